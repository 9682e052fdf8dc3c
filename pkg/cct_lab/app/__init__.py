"""
cctlab - Hochschild cohomology của diagram algebra trên finite category
"""
__version__ = "1.0.0"
__author__ = "CCT Lab Team"
