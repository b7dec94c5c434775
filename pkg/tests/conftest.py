import os
import sys

# make the shared oracle helpers importable regardless of invocation cwd
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
