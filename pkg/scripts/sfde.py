#!/usr/bin/env python3
"""
CLI Script: SFDE Toolkit
========================

Command-line wrapper for simulate, estimate and montecarlo.

Usage:
    python scripts/sfde.py simulate --config config/noise_0.1.yaml --out output/noise_0.1
    python scripts/sfde.py estimate output/noise_0.1/path.csv --config config/noise_0.1.yaml
    python scripts/sfde.py montecarlo --config config/noise_0.01.yaml --workers 8
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main


if __name__ == "__main__":
    main()
