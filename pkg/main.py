"""
trackshade entry point.

    python main.py construct no-shade --shade-length 1/2 > schedule.json
    python main.py verify schedule.json
"""

from src.cli import app

if __name__ == "__main__":
    app()
