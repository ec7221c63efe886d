"""Plain-text key=value manifests shared by checkpoints and run artifacts."""

import ast
from pathlib import Path


def write_kv(path, entries: dict) -> None:
    lines = []
    for key, value in entries.items():
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_kv(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(" = ")
        out[key] = value
    return out


def parse_literal(text: str):
    """Parse a manifest value back into a python literal where possible."""
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text
