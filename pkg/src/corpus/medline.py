"""MEDLINE-style tagged lines, shared by API responses and the on-disk cache.

Parsing goes through Biopython's MEDLINE reader; the cache writes the same
`TAG - value` layout back, one author per `AU` line.
"""
from io import StringIO
from pathlib import Path
from typing import List, Optional, Union

from Bio import Medline

from src.corpus.schemas import DocumentRecord

TAG_ID = "PMID"
TAG_TITLE = "TI"
TAG_ABSTRACT = "AB"
TAG_AUTHOR = "AU"
TAG_JOURNAL = "JT"
TAG_LABEL = "LB"

AUTHOR_SEPARATOR = ", "


def _tag_line(tag: str, value: str) -> str:
    return f"{tag:<4}- {value}"


def _text(record: Medline.Record, tag: str) -> str:
    # Biopython joins known text tags into a string and leaves the rest as lists
    value: Union[str, List[str]] = record.get(tag, "")
    return value if isinstance(value, str) else " ".join(value)


def parse_medline(text: str) -> List[Medline.Record]:
    """One Biopython record per blank-line separated block; continuation lines are joined."""
    return list(Medline.parse(StringIO(text)))


def to_document(record: Medline.Record, label: int, doc_id: Optional[str] = None) -> DocumentRecord:
    return DocumentRecord(
        doc_id=doc_id or _text(record, TAG_ID),
        title=_text(record, TAG_TITLE),
        abstract=_text(record, TAG_ABSTRACT),
        authors=AUTHOR_SEPARATOR.join(record.get(TAG_AUTHOR, [])),
        journal=_text(record, TAG_JOURNAL),
        label=label,
    )


def to_medline(record: DocumentRecord) -> Medline.Record:
    fields = Medline.Record()
    fields[TAG_ID] = record.doc_id
    fields[TAG_TITLE] = record.title
    fields[TAG_ABSTRACT] = record.abstract
    fields[TAG_AUTHOR] = record.authors.split(AUTHOR_SEPARATOR) if record.authors else []
    fields[TAG_JOURNAL] = record.journal
    fields[TAG_LABEL] = [str(record.label)]
    return fields


def format_record(record: DocumentRecord) -> str:
    lines = []
    for tag, value in to_medline(record).items():
        values = [value] if isinstance(value, str) else value
        lines.extend(_tag_line(tag, item) for item in values)
    return "\n".join(lines) + "\n"


def read_record_file(path: Path) -> DocumentRecord:
    record = parse_medline(path.read_text(encoding="utf-8"))[0]
    return to_document(record, label=int(_text(record, TAG_LABEL)))


def write_record_file(path: Path, record: DocumentRecord) -> None:
    path.write_text(format_record(record), encoding="utf-8", newline="\n")
