"""One-paper update steps: routing, synthesis, merge, citations, publishing.

The merge is insertion-only. A step may add sentences to exactly one
routed section, append at most one row to the routed table, and append
reference entries; it never rewrites, reorders or deletes existing
content and never touches the outline. Those guarantees hold by
construction, not by checking.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .agents import (
    APPEND,
    run_abstention_agent,
    run_analysis_agent,
    run_section_routing,
    run_table_routing,
    run_table_synthesis,
    run_text_synthesis,
)
from .corpus import PaperRecord
from .document import (
    Reference,
    Section,
    Sentence,
    SurveyDocument,
    SurveyState,
    serialize_document,
    validate_document,
)
from .endpoints import TextGenerator
from .errors import (
    AgentError,
    CitationError,
    ConfigError,
    DocumentIntegrityError,
    OutlineNotApprovedError,
    TableSynthesisError,
)
from .text import segment_sentences

logger = logging.getLogger(__name__)

CITE_PLACEHOLDER = "[cite]"

Clock = Callable[[], str]


def utc_clock() -> str:
    return datetime.now(timezone.utc).isoformat()


def make_step_clock(start: int = 0) -> Clock:
    """Deterministic clock for mock-driven runs: one second per tick."""
    counter = {"tick": start}

    def tick() -> str:
        stamp = datetime.fromtimestamp(counter["tick"], tz=timezone.utc).isoformat()
        counter["tick"] += 1
        return stamp

    return tick


@dataclass(frozen=True)
class UpdateRecord:
    """Full audit of one update step; replaying it reproduces the state delta."""

    paper_id: str
    decision: str  # "abstained" | "updated" | "failed"
    routed_section: str | None = None
    routed_table: str | None = None
    ranked_sections: tuple[str, ...] = ()
    table_votes: tuple[tuple[str, bool], ...] = ()
    insertion_sentence_id: str | None = None
    inserted_sentence_ids: tuple[str, ...] = ()
    draft_text: str = ""
    inserted_row: dict | None = None
    resolved_citation_keys: tuple[str, ...] = ()
    placeholder_count: int = 0
    started_at: str = ""
    finished_at: str = ""
    error: str | None = None
    table_error: str | None = None


def insert_paragraph(
    section: Section,
    after: str,
    paragraph: str,
) -> tuple[Section, tuple[str, ...]]:
    """Splice a paragraph into a section immediately after a sentence.

    ``after`` is an existing sentence id or ``"append"``. The paragraph is
    segmented into sentences which receive fresh monotonic ids; every
    pre-existing sentence keeps its id, text and relative order. An empty
    paragraph is a no-op.
    """
    if after != APPEND and after not in section.sentence_ids():
        raise ValueError(f"insertion point {after!r} does not exist in section {section.id!r}")
    texts = segment_sentences(paragraph)
    if not texts:
        return section, ()
    counter = section.next_sentence_counter()
    inserted = tuple(
        Sentence(id=f"{section.id}:{counter + i}", text=text) for i, text in enumerate(texts))
    if after == APPEND:
        position = len(section.sentences)
    else:
        position = section.sentence_ids().index(after) + 1
    sentences = section.sentences[:position] + inserted + section.sentences[position:]
    new_section = Section(
        id=section.id, title=section.title, sentences=sentences,
        non_maintained=section.non_maintained)
    return new_section, tuple(s.id for s in inserted)


def resolve_citations(
    draft: str,
    bib_entries: list[dict],
    doc: SurveyDocument,
) -> tuple[str, tuple[Reference, ...], tuple[str, ...]]:
    """Replace ``[cite]`` placeholders with numeric markers.

    A key already present in the references keeps its number; a new key is
    appended with number max+1. A single bib entry covers every
    placeholder in the draft; with several entries, placeholders map to
    entries positionally. Returns the final text, the updated reference
    list and the resolved keys in placeholder order.
    """
    count = draft.count(CITE_PLACEHOLDER)
    if count == 0:
        return draft, doc.references, ()
    if not bib_entries:
        raise CitationError("draft contains a [cite] placeholder but no bib entry was provided")
    if len(bib_entries) == 1:
        mapping = [bib_entries[0]] * count
    elif len(bib_entries) >= count:
        mapping = list(bib_entries[:count])
    else:
        raise CitationError(
            f"draft has {count} placeholders but only {len(bib_entries)} bib entries")

    references = list(doc.references)
    numbers = {r.key: r.number for r in references}
    next_number = max((r.number for r in references), default=0) + 1
    resolved_keys: list[str] = []
    pieces = draft.split(CITE_PLACEHOLDER)
    final = [pieces[0]]
    for index, entry in enumerate(mapping):
        key = str(entry.get("key", ""))
        if not key:
            raise CitationError("bib entry has no citation key")
        if key not in numbers:
            numbers[key] = next_number
            bib = {k: v for k, v in entry.items() if k != "key"}
            references.append(Reference(key=key, number=next_number, bib=bib))
            next_number += 1
        resolved_keys.append(key)
        final.append(f"[{numbers[key]}]")
        final.append(pieces[index + 1])
    return "".join(final), tuple(references), tuple(resolved_keys)


def _merge(
    doc: SurveyDocument,
    paper: PaperRecord,
    routed_section: str,
    insertion: str,
    draft: str,
    row: dict | None,
    routed_table: str | None,
) -> tuple[SurveyDocument, tuple[str, ...], tuple[str, ...], int]:
    """Deterministic merge of synthesis outputs into a new document."""
    placeholder_count = draft.count(CITE_PLACEHOLDER)
    resolved_text, references, resolved_keys = resolve_citations(
        draft, [paper.bib] if paper.bib else [], doc)
    section = doc.section(routed_section)
    new_section, inserted_ids = insert_paragraph(section, insertion, resolved_text)
    new_doc = doc.replace_section(new_section).with_references(references)
    if row is not None and routed_table is not None:
        new_doc = new_doc.append_table_row(routed_table, row)
    validate_document(new_doc)
    return new_doc, inserted_ids, resolved_keys, placeholder_count


def apply_update(
    state: SurveyState,
    paper: PaperRecord,
    generator: TextGenerator,
    clock: Clock | None = None,
) -> tuple[SurveyState, UpdateRecord]:
    """Run the full update loop for one paper against one survey state.

    Analysis, abstention, routing, synthesis, merge. Abstention returns
    the state unchanged. Any agent failure after retries aborts the step
    with the state unchanged and the error recorded; a table-synthesis
    failure downgrades the step to text-only instead of aborting it.
    """
    if not state.outline.approved:
        raise OutlineNotApprovedError("updates require an approved outline")
    if state.outline.scope is None:
        raise ConfigError("outline carries no scope definition; abstention cannot run")
    now = clock or utc_clock
    started = now()

    try:
        summary = run_analysis_agent(paper, generator)
        include = run_abstention_agent(summary, state.outline.scope, generator)
        if not include:
            return state, UpdateRecord(
                paper_id=paper.id, decision="abstained",
                started_at=started, finished_at=now())

        routing = run_section_routing(summary, state.outline, state.document, generator)
        table_routing = run_table_routing(summary, state.outline, generator)
        draft = run_text_synthesis(
            state.document.section(routing.ranked_sections[0]).body_text(),
            summary, generator)

        row = None
        table_error = None
        if table_routing.table_id is not None:
            try:
                row = run_table_synthesis(
                    state.document.table(table_routing.table_id), summary, generator)
            except TableSynthesisError as exc:
                table_error = str(exc)
                logger.warning("table synthesis failed for %s; completing text-only: %s",
                               paper.id, exc)
    except AgentError as exc:
        logger.warning("update step failed for %s: %s", paper.id, exc)
        return state, UpdateRecord(
            paper_id=paper.id, decision="failed", error=str(exc),
            started_at=started, finished_at=now())

    new_doc, inserted_ids, resolved_keys, placeholder_count = _merge(
        state.document, paper, routing.ranked_sections[0],
        routing.insertion_sentence_id, draft, row, table_routing.table_id)
    if placeholder_count == 0:
        logger.info("draft for %s carries no [cite] placeholder", paper.id)
    record = UpdateRecord(
        paper_id=paper.id,
        decision="updated",
        routed_section=routing.ranked_sections[0],
        routed_table=table_routing.table_id,
        ranked_sections=routing.ranked_sections,
        table_votes=table_routing.votes,
        insertion_sentence_id=routing.insertion_sentence_id,
        inserted_sentence_ids=inserted_ids,
        draft_text=draft,
        inserted_row=row,
        resolved_citation_keys=resolved_keys,
        placeholder_count=placeholder_count,
        started_at=started,
        finished_at=now(),
        table_error=table_error,
    )
    return state.with_document(new_doc), record


def replay_update(
    state: SurveyState,
    record: UpdateRecord,
    paper: PaperRecord,
) -> SurveyState:
    """Reproduce a recorded state delta without invoking any agent."""
    if record.decision != "updated":
        return state
    assert record.routed_section is not None
    new_doc, inserted_ids, _, _ = _merge(
        state.document, paper, record.routed_section,
        record.insertion_sentence_id or APPEND, record.draft_text,
        record.inserted_row, record.routed_table)
    if inserted_ids != record.inserted_sentence_ids:
        raise DocumentIntegrityError(
            f"replay of {record.paper_id} produced sentence ids {inserted_ids}, "
            f"recorded {record.inserted_sentence_ids}")
    return state.with_document(new_doc)


def publish(state: SurveyState, out: str | Path) -> Path:
    """Write the canonical document file; same state, same bytes."""
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_document(state.document), encoding="utf-8")
    return path


def count_unresolved_placeholders(doc: SurveyDocument) -> int:
    total = 0
    for section in doc.sections:
        for sentence in section.sentences:
            total += sentence.text.count(CITE_PLACEHOLDER)
    return total


_NUMERIC_MARKER = re.compile(r"\[(\d+)\]")


def cited_numbers(doc: SurveyDocument) -> set[int]:
    """All numeric citation markers appearing in section text."""
    found: set[int] = set()
    for section in doc.sections:
        for sentence in section.sentences:
            for match in _NUMERIC_MARKER.finditer(sentence.text):
                found.add(int(match.group(1)))
    return found


def record_to_dict(record: UpdateRecord) -> dict:
    data = asdict(record)
    data["table_votes"] = [[table_id, vote] for table_id, vote in record.table_votes]
    return data


def record_from_dict(data: dict) -> UpdateRecord:
    return UpdateRecord(
        paper_id=str(data["paper_id"]),
        decision=str(data["decision"]),
        routed_section=data.get("routed_section"),
        routed_table=data.get("routed_table"),
        ranked_sections=tuple(data.get("ranked_sections", [])),
        table_votes=tuple((str(t), bool(v)) for t, v in data.get("table_votes", [])),
        insertion_sentence_id=data.get("insertion_sentence_id"),
        inserted_sentence_ids=tuple(data.get("inserted_sentence_ids", [])),
        draft_text=str(data.get("draft_text", "")),
        inserted_row=data.get("inserted_row"),
        resolved_citation_keys=tuple(data.get("resolved_citation_keys", [])),
        placeholder_count=int(data.get("placeholder_count", 0)),
        started_at=str(data.get("started_at", "")),
        finished_at=str(data.get("finished_at", "")),
        error=data.get("error"),
        table_error=data.get("table_error"),
    )


def write_audit_log(records: list[UpdateRecord], path: str | Path) -> None:
    """Store update records as newline-delimited JSON."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(record_to_dict(r), ensure_ascii=False, sort_keys=True) for r in records]
    out.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_audit_log(path: str | Path) -> list[UpdateRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(record_from_dict(json.loads(line)))
    return records
