"""Survey document model: sections, tables, references, outline, state.

Values are immutable snapshots; every edit builds a new document. The
canonical on-disk form is a single JSON container with ``metadata``,
``sections``, ``tables`` and ``references`` keys. Serialization is
deterministic, so equal documents produce byte-identical files.

Sentence identifiers are ``"{section_id}:{counter}"`` with counters
assigned monotonically per section and never reused, which keeps
pre-existing identifiers stable under additive edits.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import SurveyScope, scope_from_dict, scope_to_dict
from .errors import DocumentIntegrityError, DocumentParseError
from .text import segment_sentences

COLUMN_KINDS = ("text", "categorical", "int")


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str


@dataclass(frozen=True)
class Section:
    id: str
    title: str
    sentences: tuple[Sentence, ...]
    non_maintained: bool = False

    def sentence_ids(self) -> list[str]:
        return [s.id for s in self.sentences]

    def body_text(self) -> str:
        return " ".join(s.text for s in self.sentences)

    def next_sentence_counter(self) -> int:
        counters = [int(s.id.rsplit(":", 1)[1]) for s in self.sentences]
        return max(counters, default=0) + 1


@dataclass(frozen=True)
class ColumnSpec:
    """Schema of one table column.

    ``kind`` is ``"text"`` (free text), ``"categorical"`` (value must be
    one of ``values``) or ``"int"`` (integer within [minimum, maximum]).
    """

    name: str
    kind: str = "text"
    values: tuple[str, ...] = ()
    minimum: int | None = None
    maximum: int | None = None

    def check_value(self, value: object) -> str | None:
        """Return a problem description for an invalid value, else None."""
        if self.kind == "categorical":
            if value not in self.values:
                allowed = ", ".join(self.values)
                return f"value {value!r} for column {self.name!r} not in {{{allowed}}}"
        elif self.kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                return f"value {value!r} for column {self.name!r} is not an integer"
            if self.minimum is not None and value < self.minimum:
                return f"value {value} for column {self.name!r} below minimum {self.minimum}"
            if self.maximum is not None and value > self.maximum:
                return f"value {value} for column {self.name!r} above maximum {self.maximum}"
        return None


@dataclass(frozen=True)
class SurveyTable:
    id: str
    title: str
    schema: tuple[ColumnSpec, ...]
    rows: tuple[dict, ...] = ()

    def check_row(self, row: dict) -> list[str]:
        """Return all schema violations of a candidate row."""
        problems: list[str] = []
        expected = [c.name for c in self.schema]
        missing = [n for n in expected if n not in row]
        extra = [n for n in row if n not in expected]
        if missing:
            problems.append(f"row missing columns {missing} of table {self.id!r}")
        if extra:
            problems.append(f"row has unknown columns {extra} for table {self.id!r}")
        for column in self.schema:
            if column.name in row:
                problem = column.check_value(row[column.name])
                if problem:
                    problems.append(problem)
        return problems


@dataclass(frozen=True)
class Reference:
    key: str
    number: int
    bib: dict


@dataclass(frozen=True)
class SurveyDocument:
    metadata: dict
    sections: tuple[Section, ...]
    tables: tuple[SurveyTable, ...]
    references: tuple[Reference, ...]

    def section(self, section_id: str) -> Section:
        for section in self.sections:
            if section.id == section_id:
                return section
        raise KeyError(f"no section {section_id!r}")

    def table(self, table_id: str) -> SurveyTable:
        for table in self.tables:
            if table.id == table_id:
                return table
        raise KeyError(f"no table {table_id!r}")

    def replace_section(self, new_section: Section) -> "SurveyDocument":
        sections = tuple(new_section if s.id == new_section.id else s for s in self.sections)
        return replace(self, sections=sections)

    def append_table_row(self, table_id: str, row: dict) -> "SurveyDocument":
        table = self.table(table_id)
        problems = table.check_row(row)
        if problems:
            raise DocumentIntegrityError("; ".join(problems))
        new_table = replace(table, rows=table.rows + (dict(row),))
        tables = tuple(new_table if t.id == table_id else t for t in self.tables)
        return replace(self, tables=tables)

    def with_references(self, references: tuple[Reference, ...]) -> "SurveyDocument":
        return replace(self, references=references)


@dataclass(frozen=True)
class SectionEntry:
    id: str
    section_title: str
    page_numbers: str
    table_relevant: tuple[int, ...]
    summary: str


@dataclass(frozen=True)
class TableEntry:
    id: str
    title: str
    page_numbers: str
    summary: str


@dataclass(frozen=True)
class StructuredOutline:
    """Frozen structural specification a maintenance epoch runs against."""

    section_entries: tuple[SectionEntry, ...]
    table_entries: tuple[TableEntry, ...]
    scope: SurveyScope | None = None
    approved: bool = False

    def section_ids(self) -> list[str]:
        return [e.id for e in self.section_entries]

    def table_ids(self) -> list[str]:
        return [e.id for e in self.table_entries]


@dataclass(frozen=True)
class SurveyState:
    """The maintained pair of document content and frozen outline."""

    document: SurveyDocument
    outline: StructuredOutline
    epoch_id: str = "epoch-1"

    def with_document(self, document: SurveyDocument) -> "SurveyState":
        return replace(self, document=document)


def start_new_epoch(state: SurveyState, outline: StructuredOutline, epoch_id: str) -> SurveyState:
    """Replace the outline; the only sanctioned way a structure changes."""
    return SurveyState(document=state.document, outline=outline, epoch_id=epoch_id)


def validate_document(doc: SurveyDocument) -> None:
    """Check the structural invariants of a document; raise on violation."""
    section_ids = [s.id for s in doc.sections]
    if len(section_ids) != len(set(section_ids)):
        raise DocumentIntegrityError(f"duplicate section ids in {sorted(section_ids)}")
    table_ids = [t.id for t in doc.tables]
    if len(table_ids) != len(set(table_ids)):
        raise DocumentIntegrityError(f"duplicate table ids in {sorted(table_ids)}")
    keys = [r.key for r in doc.references]
    if len(keys) != len(set(keys)):
        raise DocumentIntegrityError("duplicate reference keys")
    numbers = [r.number for r in doc.references]
    if numbers != list(range(1, len(numbers) + 1)):
        raise DocumentIntegrityError(f"reference numbering {numbers} is not dense 1..n")
    for section in doc.sections:
        ids = section.sentence_ids()
        if len(ids) != len(set(ids)):
            raise DocumentIntegrityError(f"duplicate sentence ids in section {section.id!r}")
        for sentence in section.sentences:
            if not sentence.text.strip():
                raise DocumentIntegrityError(
                    f"empty sentence {sentence.id!r} in section {section.id!r}")
    for table in doc.tables:
        for index, row in enumerate(table.rows):
            problems = table.check_row(row)
            if problems:
                raise DocumentIntegrityError(f"table {table.id!r} row {index}: " + "; ".join(problems))


def validate_state(state: SurveyState) -> None:
    """Check document/outline coherence for a maintained state."""
    outline_sections = set(state.outline.section_ids())
    outline_tables = set(state.outline.table_ids())
    for section in state.document.sections:
        if section.id not in outline_sections and not section.non_maintained:
            raise DocumentIntegrityError(
                f"section {section.id!r} is not in the outline and not flagged non_maintained")
    for table in state.document.tables:
        if table.id not in outline_tables:
            raise DocumentIntegrityError(f"table {table.id!r} is not in the outline")
    doc_sections = {s.id for s in state.document.sections}
    doc_tables = {t.id for t in state.document.tables}
    for entry_id in outline_sections:
        if entry_id not in doc_sections:
            raise DocumentIntegrityError(f"outline section {entry_id!r} missing from document")
    for entry_id in outline_tables:
        if entry_id not in doc_tables:
            raise DocumentIntegrityError(f"outline table {entry_id!r} missing from document")


def make_section(section_id: str, title: str, text: str, non_maintained: bool = False) -> Section:
    """Build a Section by segmenting body text and numbering sentences from 1."""
    texts = segment_sentences(text)
    sentences = tuple(Sentence(id=f"{section_id}:{i}", text=t) for i, t in enumerate(texts, start=1))
    return Section(id=section_id, title=title, sentences=sentences, non_maintained=non_maintained)


def _column_from_dict(data: dict, table_id: str) -> ColumnSpec:
    kind = str(data.get("kind", "text"))
    if kind not in COLUMN_KINDS:
        raise DocumentParseError(f"table {table_id!r}: unknown column kind {kind!r}")
    return ColumnSpec(
        name=str(data["name"]),
        kind=kind,
        values=tuple(str(v) for v in data.get("values", [])),
        minimum=data.get("min"),
        maximum=data.get("max"),
    )


def _column_to_dict(column: ColumnSpec) -> dict:
    data: dict = {"name": column.name, "kind": column.kind}
    if column.kind == "categorical":
        data["values"] = list(column.values)
    if column.kind == "int":
        data["min"] = column.minimum
        data["max"] = column.maximum
    return data


def document_from_dict(data: dict) -> SurveyDocument:
    """Build and validate a SurveyDocument from its canonical JSON mapping."""
    if not isinstance(data, dict):
        raise DocumentParseError("survey document must be a JSON object")
    sections = []
    for raw in data.get("sections", []):
        try:
            sections.append(make_section(
                section_id=str(raw["id"]),
                title=str(raw.get("title", "")),
                text=str(raw.get("text", "")),
                non_maintained=bool(raw.get("non_maintained", False)),
            ))
        except KeyError as exc:
            raise DocumentParseError(f"section entry missing field {exc}") from exc
    tables = []
    for raw in data.get("tables", []):
        table_id = str(raw.get("id", "?"))
        try:
            schema = tuple(_column_from_dict(c, table_id) for c in raw["schema"])
            table = SurveyTable(
                id=table_id,
                title=str(raw.get("title", "")),
                schema=schema,
                rows=tuple(dict(r) for r in raw.get("rows", [])),
            )
        except KeyError as exc:
            raise DocumentParseError(f"table {table_id!r} missing field {exc}") from exc
        tables.append(table)
    references = []
    for raw in data.get("references", []):
        try:
            references.append(Reference(
                key=str(raw["key"]),
                number=int(raw["number"]),
                bib=dict(raw.get("bib", {})),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentParseError(f"malformed reference entry {raw!r}: {exc}") from exc
    doc = SurveyDocument(
        metadata=dict(data.get("metadata", {})),
        sections=tuple(sections),
        tables=tuple(tables),
        references=tuple(references),
    )
    validate_document(doc)
    return doc


def document_to_dict(doc: SurveyDocument) -> dict:
    sections = []
    for section in doc.sections:
        entry: dict = {"id": section.id, "title": section.title, "text": section.body_text()}
        if section.non_maintained:
            entry["non_maintained"] = True
        sections.append(entry)
    return {
        "metadata": dict(doc.metadata),
        "sections": sections,
        "tables": [
            {
                "id": t.id,
                "title": t.title,
                "schema": [_column_to_dict(c) for c in t.schema],
                "rows": [dict(r) for r in t.rows],
            }
            for t in doc.tables
        ],
        "references": [
            {"key": r.key, "number": r.number, "bib": dict(r.bib)} for r in doc.references
        ],
    }


def parse_document(raw: str) -> SurveyDocument:
    """Parse the canonical survey-document container from JSON text."""
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"survey document is not valid JSON: {exc}") from exc
    return document_from_dict(data)


def serialize_document(doc: SurveyDocument) -> str:
    """Render the canonical, deterministic JSON form of a document."""
    return json.dumps(document_to_dict(doc), indent=2, ensure_ascii=False) + "\n"


def load_document(path: str | Path) -> SurveyDocument:
    return parse_document(Path(path).read_text(encoding="utf-8"))


def save_document(doc: SurveyDocument, path: str | Path) -> None:
    Path(path).write_text(serialize_document(doc), encoding="utf-8")


def outline_from_dict(data: dict) -> StructuredOutline:
    try:
        section_entries = tuple(
            SectionEntry(
                id=str(e["id"]),
                section_title=str(e["section_title"]),
                page_numbers=str(e.get("page_numbers", "")),
                table_relevant=tuple(int(v) for v in e.get("table_relevant", [])),
                summary=str(e.get("summary", "")),
            )
            for e in data.get("sections", [])
        )
        table_entries = tuple(
            TableEntry(
                id=str(e["id"]),
                title=str(e["title"]),
                page_numbers=str(e.get("page_numbers", "")),
                summary=str(e.get("summary", "")),
            )
            for e in data.get("tables", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentParseError(f"malformed outline entry: {exc}") from exc
    scope = scope_from_dict(data["scope"]) if data.get("scope") else None
    outline = StructuredOutline(
        section_entries=section_entries,
        table_entries=table_entries,
        scope=scope,
        approved=bool(data.get("approved", False)),
    )
    for entry in outline.section_entries:
        if len(entry.table_relevant) != len(outline.table_entries):
            raise DocumentIntegrityError(
                f"outline section {entry.id!r}: table_relevant has "
                f"{len(entry.table_relevant)} flags for {len(outline.table_entries)} tables")
    return outline


def outline_to_dict(outline: StructuredOutline) -> dict:
    data: dict = {
        "approved": outline.approved,
        "sections": [
            {
                "id": e.id,
                "section_title": e.section_title,
                "page_numbers": e.page_numbers,
                "table_relevant": list(e.table_relevant),
                "summary": e.summary,
            }
            for e in outline.section_entries
        ],
        "tables": [
            {"id": e.id, "title": e.title, "page_numbers": e.page_numbers, "summary": e.summary}
            for e in outline.table_entries
        ],
    }
    if outline.scope is not None:
        data["scope"] = scope_to_dict(outline.scope)
    return data


def parse_outline(raw: str) -> StructuredOutline:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"outline is not valid JSON: {exc}") from exc
    return outline_from_dict(data)


def serialize_outline(outline: StructuredOutline) -> str:
    return json.dumps(outline_to_dict(outline), indent=2, ensure_ascii=False) + "\n"


def load_outline(path: str | Path) -> StructuredOutline:
    return parse_outline(Path(path).read_text(encoding="utf-8"))


def save_outline(outline: StructuredOutline, path: str | Path) -> None:
    Path(path).write_text(serialize_outline(outline), encoding="utf-8")


def outline_fingerprint(outline: StructuredOutline) -> str:
    """Content hash used to prove the outline survives update streams."""
    return hashlib.sha256(serialize_outline(outline).encode("utf-8")).hexdigest()


def normalize_document_text(raw: str) -> str:
    """Canonical form of a document file: parse then serialize."""
    return serialize_document(parse_document(raw))


__all__ = [
    "COLUMN_KINDS", "ColumnSpec", "Reference", "Section", "SectionEntry", "Sentence",
    "StructuredOutline", "SurveyDocument", "SurveyState", "SurveyTable", "TableEntry",
    "document_from_dict", "document_to_dict", "load_document", "load_outline",
    "make_section", "normalize_document_text", "outline_fingerprint", "outline_from_dict",
    "outline_to_dict", "parse_document", "parse_outline", "save_document", "save_outline",
    "serialize_document", "serialize_outline", "start_new_epoch", "validate_document",
    "validate_state",
]
