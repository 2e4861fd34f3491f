from src.corpus import medline
from src.corpus.schemas import DocumentRecord

PUBMED_TEXT = """PMID- 12345
TI  - Angiotensin converting enzyme inhibitors in heart failure: a
      randomized trial.
AB  - Background text
      continues here.
AU  - Smith J
AU  - Doe A
JT  - The Lancet

PMID- 67890
TI  - Second record
"""


def test_parse_medline_joins_continuations_and_repeated_tags():
    first, second = medline.parse_medline(PUBMED_TEXT)
    assert first["TI"] == "Angiotensin converting enzyme inhibitors in heart failure: a randomized trial."
    assert first["AB"] == "Background text continues here."
    assert first["AU"] == ["Smith J", "Doe A"]
    record = medline.to_document(first, label=1)
    assert record.doc_id == "12345"
    assert record.authors == "Smith J, Doe A"
    assert record.journal == "The Lancet"
    assert second["PMID"] == "67890"
    assert "AB" not in second


def test_record_file_round_trip_is_byte_equal(tmp_path):
    record = DocumentRecord(
        doc_id="42", title="A  title\nover lines", abstract="Text", authors="Smith J, Doe A", journal="BMJ", label=1,
    )
    path = tmp_path / "42.txt"
    medline.write_record_file(path, record)
    first = path.read_bytes()
    reread = medline.read_record_file(path)
    assert reread == record
    medline.write_record_file(path, reread)
    assert path.read_bytes() == first


def test_empty_record_survives_the_cache(tmp_path):
    record = DocumentRecord(doc_id="7", label=0)
    path = tmp_path / "7.txt"
    medline.write_record_file(path, record)
    assert medline.read_record_file(path) == record


def test_untracked_tags_are_ignored_by_the_document():
    text = """PMID- 555
TI  - Heading tags
MH  - Humans
MH  - *Heart Failure/drug
      therapy
DP  - 2004 Mar
AB  - Body.
"""
    (fields,) = medline.parse_medline(text)
    assert len(fields["MH"]) == 2
    assert fields["DP"] == "2004 Mar"
    record = medline.to_document(fields, label=0)
    assert (record.doc_id, record.title, record.abstract, record.authors) == ("555", "Heading tags", "Body.", "")


def test_format_record_writes_one_author_per_line():
    record = DocumentRecord(doc_id="9", title="T", authors="Smith J, Doe A", journal="BMJ", label=0)
    assert medline.format_record(record).splitlines() == [
        "PMID- 9",
        "TI  - T",
        "AB  - ",
        "AU  - Smith J",
        "AU  - Doe A",
        "JT  - BMJ",
        "LB  - 0",
    ]
