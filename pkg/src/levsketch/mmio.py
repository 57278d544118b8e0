"""Matrix Market array-format I/O.

Only the dense ``array real general`` flavor is supported: a header line,
optional ``%`` comments, a ``rows cols`` size line, then one entry per line
in column-major order.  Writes use scientific notation with 17 significant
digits, so a write/read round trip reproduces every float64 bit for bit.
"""

from __future__ import annotations

import os

from .exceptions import MatrixMarketParseError
from .linalg import DenseMatrix

_HEADER_FIELDS = ("%%matrixmarket", "matrix", "array", "real", "general")


def write_matrix(path: str | os.PathLike, m: DenseMatrix) -> None:
    """Write a matrix in Matrix Market array format."""
    if not isinstance(m, DenseMatrix):
        m = DenseMatrix.from_array(m)
    lines = ["%%MatrixMarket matrix array real general", f"{m.rows} {m.cols}"]
    lines.extend(format(v, ".16e") for v in m.data)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_matrix(path: str | os.PathLike) -> DenseMatrix:
    """Read a Matrix Market array-format file.

    Raises
    ------
    MatrixMarketParseError
        On any malformed content, carrying the 1-based line number.
    OSError
        If the file cannot be opened.
    """
    with open(path, "r") as fh:
        raw = fh.read()
    lines = raw.splitlines()
    if not lines:
        raise MatrixMarketParseError("empty file", line=1)

    header = lines[0].split()
    if [t.lower() for t in header] != list(_HEADER_FIELDS):
        raise MatrixMarketParseError(
            "expected header '%%MatrixMarket matrix array real general'", line=1
        )

    lineno = 1
    size: tuple[int, int] | None = None
    values: list[float] = []
    for lineno, text in enumerate(lines[1:], start=2):
        stripped = text.strip()
        if not stripped or stripped.startswith("%"):
            if size is not None and stripped.startswith("%"):
                raise MatrixMarketParseError("comment after size line", line=lineno)
            continue
        if size is None:
            parts = stripped.split()
            if len(parts) != 2:
                raise MatrixMarketParseError(
                    f"size line must be 'rows cols', got {stripped!r}", line=lineno
                )
            try:
                rows, cols = int(parts[0]), int(parts[1])
            except ValueError:
                raise MatrixMarketParseError(
                    f"non-integer dimensions {stripped!r}", line=lineno
                ) from None
            if rows < 1 or cols < 1:
                raise MatrixMarketParseError(
                    f"dimensions must be positive, got {rows} {cols}", line=lineno
                )
            size = (rows, cols)
            continue
        for token in stripped.split():
            try:
                v = float(token)
            except ValueError:
                raise MatrixMarketParseError(
                    f"non-numeric entry {token!r}", line=lineno
                ) from None
            if v != v or v in (float("inf"), float("-inf")):
                raise MatrixMarketParseError(
                    f"non-finite entry {token!r}", line=lineno
                )
            values.append(v)
            if size is not None and len(values) > size[0] * size[1]:
                raise MatrixMarketParseError("more entries than rows*cols", line=lineno)

    if size is None:
        raise MatrixMarketParseError("missing size line", line=lineno)
    rows, cols = size
    if len(values) != rows * cols:
        raise MatrixMarketParseError(
            f"expected {rows * cols} entries, found {len(values)}", line=lineno
        )
    return DenseMatrix(rows, cols, values)
