"""
Core modules cho cctlab: exact linear algebra, finite categories, complexes, diagram algebras
"""
