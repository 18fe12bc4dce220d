"""
Utilities
=========

CSV and manifest storage for run artifacts.
"""

from .storage import (
    ensure_dir,
    write_rows,
    write_path_csv,
    read_path_csv,
    write_qq_csv,
    save_manifest,
    load_manifest,
)

__all__ = [
    "ensure_dir",
    "write_rows",
    "write_path_csv",
    "read_path_csv",
    "write_qq_csv",
    "save_manifest",
    "load_manifest",
]
