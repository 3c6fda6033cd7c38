#!/usr/bin/env python3
"""
Stego-Hawk command-line entry point

Usage:
    python stego_hawk.py embed --cover cover.png --audio clip.wav --stego stego.png
    python stego_hawk.py extract --stego stego.png --key stego.key --output recovered.wav
    python stego_hawk.py metrics --cover cover.png --stego stego.png
    python stego_hawk.py bench --covers covers/ --audio clip.wav --seeds 1 2 3 4 5
"""
import sys
from pathlib import Path

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
