# Utility helper functions: files, canonical JSON, logging, text rendering

import hashlib
import json
import logging
import os
import sys
from typing import Any, Dict

import numpy as np

from utils.errors import InputFileError


def ensure_directory(path: str) -> None:
    """
    Ensure a directory exists, create if it doesn't.

    Args:
        path: Directory path to create
    """
    if path:
        os.makedirs(path, exist_ok=True)


def save_to_file(content: str, filepath: str) -> None:
    """
    Save text to a file, creating parent directories.

    Args:
        content: Content to save
        filepath: Path to save the file
    """
    ensure_directory(os.path.dirname(filepath))
    with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
        f.write(content)


def load_from_file(filepath: str) -> str:
    """
    Load a UTF-8 text file.

    Args:
        filepath: Path to the file

    Returns:
        File content as string

    Raises:
        InputFileError: If the file cannot be read
    """
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputFileError(f"cannot read {filepath}: {e}") from e


def dump_json(data: Any) -> str:
    """
    Canonical JSON text: two-space indent, full float precision, trailing newline.

    Identical data always produces byte-identical output.
    """
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def save_json(data: Dict[str, Any], filepath: str) -> None:
    """
    Save data as a canonical JSON file.

    Args:
        data: Dictionary to save
        filepath: Path to save the JSON file
    """
    save_to_file(dump_json(data), filepath)


def load_json(filepath: str) -> Dict[str, Any]:
    """
    Load JSON file.

    Args:
        filepath: Path to the JSON file

    Returns:
        Parsed JSON object

    Raises:
        InputFileError: If the file is unreadable or not valid JSON
    """
    text = load_from_file(filepath)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFileError(f"{filepath} is not valid JSON: {e}") from e


def digest(data: Any) -> str:
    """sha256 of the canonical JSON rendering of data."""
    return "sha256:" + hashlib.sha256(dump_json(data).encode("utf-8")).hexdigest()


def setup_logging(level: str = "WARNING") -> None:
    """
    Route log records to stderr so stdout stays machine-readable.

    Args:
        level: Logging level name
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_qwp", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler._qwp = True
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level.upper())


def format_scalar(z: complex) -> str:
    """Six significant digits; the imaginary part is shown only when nonzero."""
    re, im = float(np.real(z)), float(np.imag(z))
    if abs(im) < 5e-7 * max(1.0, abs(re)):
        return f"{re:.6g}"
    sign = "+" if im >= 0 else "-"
    return f"{re:.6g}{sign}{abs(im):.6g}i"


def format_matrix(matrix: np.ndarray, indent: str = "  ") -> str:
    """
    Render a matrix as aligned text rows.

    Args:
        matrix: 2-D array
        indent: Prefix for every row

    Returns:
        Multi-line string
    """
    cells = [[format_scalar(z) for z in row] for row in np.asarray(matrix)]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join(indent + "[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)
