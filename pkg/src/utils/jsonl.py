"""JSON Lines reading and writing for pydantic models."""

from collections.abc import Iterable, Iterator
from pathlib import Path

from pydantic import BaseModel, ValidationError

from src.exceptions import FormatError


def iter_jsonl[M: BaseModel](path: str | Path, model: type[M]) -> Iterator[M]:
    """Parse a JSONL file line by line into pydantic models.

    Blank lines are skipped.

    Args:
        path: File to read
        model: Pydantic model class for each line

    Yields:
        One validated model per non-blank line

    Raises:
        FileNotFoundError: If the file doesn't exist
        FormatError: On the first line that fails to parse (with line number)
    """
    with open(path, "rb") as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise FormatError(
                    f"Invalid UTF-8 in {path} at byte {e.start}", line=line_no
                ) from e
            try:
                item = model.model_validate_json(line)
            except ValidationError as e:
                first = e.errors()[0]
                where = ".".join(str(p) for p in first.get("loc", ()))
                raise FormatError(
                    f"Invalid {model.__name__} in {path}: {where} {first['msg']}",
                    line=line_no,
                ) from e
            yield item


def read_jsonl[M: BaseModel](path: str | Path, model: type[M]) -> list[M]:
    """Read a whole JSONL file (see iter_jsonl)."""
    return list(iter_jsonl(path, model))


def write_jsonl(path: str | Path, items: Iterable[BaseModel]) -> int:
    """Write models as JSON Lines, one per line.

    Args:
        path: Destination file (parent directories are created)
        items: Models to serialize

    Returns:
        Number of lines written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for item in items:
            f.write(item.model_dump_json(exclude_none=True))
            f.write("\n")
            count += 1
    return count
