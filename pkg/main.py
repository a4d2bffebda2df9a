#!/usr/bin/env python3
# Main entry point for the qwp verifier

import sys
import os

# Add current directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli.app import main

if __name__ == "__main__":
    sys.exit(main())
