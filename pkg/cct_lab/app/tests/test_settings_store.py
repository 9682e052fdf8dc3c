"""
Test Settings Persistence
settings.json dưới APPDATA và thứ tự resolve thư mục cache
"""
import os
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from app.core import settings_store


class TestSettingsStore(unittest.TestCase):

    def setUp(self):
        self.temp_appdata = Path(tempfile.mkdtemp(prefix="cct_test_appdata_"))
        env = {k: v for k, v in os.environ.items() if k != settings_store.CACHE_ENV}
        env["APPDATA"] = str(self.temp_appdata)
        self.env_patcher = patch.dict(os.environ, env, clear=True)
        self.env_patcher.start()
        settings_store.SettingsStore._instance = None

    def tearDown(self):
        self.env_patcher.stop()
        settings_store.SettingsStore._instance = None
        shutil.rmtree(self.temp_appdata, ignore_errors=True)

    def test_defaults(self):
        store = settings_store.get_settings_store()
        self.assertEqual(store.get("max_degree"), 3)
        self.assertEqual(store.get("modulus"), 0)
        self.assertEqual(store.cache_dir(), self.temp_appdata / "cctlab" / "cache")

    def test_set_persists_and_reloads(self):
        store = settings_store.get_settings_store()
        self.assertTrue(store.set("language", "en"))
        self.assertFalse(store.set("no_such_key", 1))

        path = self.temp_appdata / "cctlab" / "settings.json"
        self.assertTrue(path.exists())

        # Reset singleton để buộc load lại từ disk
        settings_store.SettingsStore._instance = None
        self.assertEqual(settings_store.get_settings_store().get("language"), "en")

    def test_unknown_keys_ignored(self):
        path = self.temp_appdata / "cctlab" / "settings.json"
        path.parent.mkdir(parents=True)
        path.write_text('{"seed": 9, "legacy": true}', encoding="utf-8")
        self.assertEqual(settings_store.get_settings_store().get("seed"), 9)

    def test_wrong_types_keep_defaults(self):
        path = self.temp_appdata / "cctlab" / "settings.json"
        path.parent.mkdir(parents=True)
        path.write_text('{"seed": "9", "workers": true, "language": "en"}', encoding="utf-8")
        store = settings_store.get_settings_store()
        self.assertEqual(store.get("seed"), 1)
        self.assertEqual(store.get("workers"), 4)
        self.assertEqual(store.get("language"), "en")

    def test_corrupt_file_falls_back(self):
        path = self.temp_appdata / "cctlab" / "settings.json"
        path.parent.mkdir(parents=True)
        path.write_text("{not json", encoding="utf-8")
        self.assertEqual(settings_store.get_settings_store().get("workers"), 4)

    def test_cache_dir_precedence(self):
        store = settings_store.get_settings_store()
        store.set("cache_dir", str(self.temp_appdata / "from_settings"))
        self.assertEqual(store.cache_dir(), self.temp_appdata / "from_settings")

        with patch.dict(os.environ, {settings_store.CACHE_ENV: str(self.temp_appdata / "from_env")}):
            self.assertEqual(store.cache_dir(), self.temp_appdata / "from_env")
            self.assertEqual(store.cache_dir("cli"), Path("cli"))
            self.assertEqual(store.log_dir(), self.temp_appdata / "from_env" / "logs")


if __name__ == "__main__":
    unittest.main()
