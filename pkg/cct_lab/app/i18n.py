"""
Internationalization (i18n) module
Hỗ trợ VI/EN với default VI cho text summary và thông báo CLI
Technical terms giữ nguyên English
"""
from typing import Dict

# Ngôn ngữ mặc định
DEFAULT_LANG = "vi"

# Translations
TRANSLATIONS: Dict[str, Dict[str, str]] = {
    "app_title": {
        "vi": "cctlab - kiểm chứng đối đồng điều Hochschild tương đối",
        "en": "cctlab - relative Hochschild cohomology toolkit",
    },

    # ===== Summary table =====
    "summary_header": {"vi": "Kết quả", "en": "Results"},
    "col_check": {"vi": "Check", "en": "Check"},
    "col_outcome": {"vi": "Kết quả", "en": "Outcome"},
    "col_time": {"vi": "Thời gian", "en": "Time"},
    "col_message": {"vi": "Ghi chú", "en": "Message"},
    "outcome_pass": {"vi": "PASS", "en": "PASS"},
    "outcome_fail": {"vi": "FAIL", "en": "FAIL"},
    "totals": {"vi": "{passed}/{total} check đạt", "en": "{passed}/{total} checks passed"},
    "cached": {"vi": "(cache)", "en": "(cached)"},
    "controls": {"vi": "negative controls: {hit}/{total} bị phát hiện",
                 "en": "negative controls: {hit}/{total} detected"},

    # ===== validate =====
    "validated": {"vi": "{kind} hợp lệ: {checked}", "en": "valid {kind}: {checked}"},
    "invalid": {"vi": "{kind} không hợp lệ: {error}", "en": "invalid {kind}: {error}"},

    # ===== subdivide =====
    "subdivided": {"vi": "{source} ({kind}) -> {objects} object, {morphisms} morphism, {result}",
                   "en": "{source} ({kind}) -> {objects} objects, {morphisms} morphisms, {result}"},
    "written": {"vi": "Đã ghi {path}", "en": "Wrote {path}"},

    # ===== hh =====
    "hh_title": {"vi": "dim HH^n(A!, M!) trên {field}", "en": "dim HH^n(A!, M!) over {field}"},
    "hh_row": {"vi": "  n = {n}: {dim}", "en": "  n = {n}: {dim}"},

    # ===== errors =====
    "error_input": {"vi": "Lỗi input: {error}", "en": "Input error: {error}"},
    "error_config": {"vi": "Config không hợp lệ: {error}", "en": "Invalid config: {error}"},
    "hint_subdivide": {"vi": "Gợi ý: chạy `cctlab subdivide` trước", "en": "Hint: run `cctlab subdivide` first"},
}

SUPPORTED = ("vi", "en")

_current_lang = DEFAULT_LANG


def set_language(lang: str) -> str:
    """Đổi ngôn ngữ; giá trị lạ bị bỏ qua. Trả về ngôn ngữ đang dùng"""
    global _current_lang
    if lang in SUPPORTED:
        _current_lang = lang
    return _current_lang


def t(key: str, **kwargs) -> str:
    """
    Translate key sang ngôn ngữ hiện tại (fallback: en, rồi chính key)

    Placeholder thiếu trong kwargs được giữ nguyên dạng {name}
    """
    trans = TRANSLATIONS.get(key, {})
    text = trans.get(_current_lang) or trans.get("en") or key
    return text.format_map(_Keep(kwargs)) if kwargs else text


class _Keep(dict):
    def __missing__(self, name):
        return "{" + name + "}"
