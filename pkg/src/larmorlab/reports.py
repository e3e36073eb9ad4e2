"""Deterministic CSV and manifest emission.

Every run writes a manifest (the fully resolved configuration in the same
key = value format) whose SHA-256 is embedded as a comment in each CSV, so
any output file can be traced back to the exact configuration that made it.
Numbers are written with 12 significant digits; repeated runs on the same
configuration produce byte-identical files.
"""
from __future__ import annotations

import hashlib
import os


def manifest_text(items) -> str:
    """The manifest body for (key, value-string) pairs."""
    return "".join(f"{key} = {value}\n" for key, value in items)


def manifest_hash(items) -> str:
    return hashlib.sha256(manifest_text(items).encode()).hexdigest()


def write_manifest(outdir, items) -> str:
    """Write manifest.txt and return its content hash."""
    body = manifest_text(items)
    digest = hashlib.sha256(body.encode()).hexdigest()
    path = os.path.join(outdir, "manifest.txt")
    with open(path, "w") as fh:
        fh.write(body)
        fh.write(f"# sha256 = {digest}\n")
    return digest


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".12g")


def write_csv(outdir, name, header, rows, digest) -> str:
    """Write one CSV with the manifest cross-reference; returns the path."""
    path = os.path.join(outdir, name)
    with open(path, "w") as fh:
        fh.write(f"# manifest: {digest}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path
