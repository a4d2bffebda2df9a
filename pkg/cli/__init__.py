# Command-line module initialization
from .app import build_parser, main
from .commands import Verifier, example_files

__all__ = [
    'build_parser',
    'main',
    'Verifier',
    'example_files',
]
