"""
Runtime defaults, overridable from the environment or a local .env file
"""
import os

from dotenv import load_dotenv

load_dotenv()

# --- CONFIGURATION ---
CONFIG = {
    'TOL': float(os.environ.get('STRINGBOUND_TOL', 1e-9)),
    'BUDGET': int(os.environ.get('STRINGBOUND_BUDGET', 2_000_000)),
    'DEFAULT_GRID': (0.0, 0.25, 0.5, 0.75, 1.0),
    'OUTPUT_DIR': os.environ.get('STRINGBOUND_OUTPUT_DIR', 'results'),
    'WORKERS': int(os.environ.get('STRINGBOUND_WORKERS', 1)),
}
