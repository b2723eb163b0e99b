import os
import sys

# Allow running the tests from a checkout without installing the package.
_SRC = os.path.join(os.path.dirname(__file__), "..", "src")
if os.path.isdir(_SRC):
    sys.path.insert(0, os.path.abspath(_SRC))
sys.path.insert(0, os.path.dirname(__file__))
