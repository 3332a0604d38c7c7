"""Defensive parsing of structured agent output.

Accepted irregularities: reasoning blocks in ``<think>`` tags, markdown
code fences, leading or trailing prose around a JSON payload, and
trailing commas. Anything else is rejected with a correction hint that
the retry machinery feeds back into the prompt.
"""

from __future__ import annotations

import json
import re


class ParseFailure(Exception):
    """An agent response could not be interpreted.

    ``hint`` is a machine-readable correction appended to the prompt on
    retry.
    """

    def __init__(self, hint: str):
        super().__init__(hint)
        self.hint = hint


_THINK_BLOCK = re.compile(r"<think>.*?</think>", re.DOTALL | re.IGNORECASE)
_CODE_FENCE = re.compile(r"```[a-zA-Z0-9_-]*\n?|```")
_TRAILING_COMMA = re.compile(r",(\s*[}\]])")
_TRUE_FALSE = re.compile(r"\b(TRUE|FALSE)\b", re.IGNORECASE)
_YES_NO = re.compile(r"\b(yes|no)\b", re.IGNORECASE)


def strip_reasoning(text: str) -> str:
    return _THINK_BLOCK.sub("", text)


def strip_code_fences(text: str) -> str:
    return _CODE_FENCE.sub("", text)


def _balanced_slice(text: str, start: int) -> str | None:
    """Return the balanced JSON value starting at ``start``, if closed."""
    opener = text[start]
    closer = {"{": "}", "[": "]"}[opener]
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        char = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif char == "\\":
                escaped = True
            elif char == '"':
                in_string = False
            continue
        if char == '"':
            in_string = True
        elif char in "{[":
            depth += 1
        elif char in "}]":
            depth -= 1
            if depth == 0:
                if char != closer and opener in "{[":
                    return None
                return text[start:i + 1]
    return None


def extract_json_value(text: str):
    """Pull the first JSON object or array out of an agent response."""
    cleaned = strip_code_fences(strip_reasoning(text)).strip()
    starts = [i for i in (cleaned.find("{"), cleaned.find("[")) if i >= 0]
    if not starts:
        raise ParseFailure("response contains no JSON object or array")
    candidate = _balanced_slice(cleaned, min(starts))
    if candidate is None:
        raise ParseFailure("JSON payload is not balanced; close all brackets")
    candidate = _TRAILING_COMMA.sub(r"\1", candidate)
    try:
        return json.loads(candidate)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"JSON payload failed to parse: {exc.msg}") from exc


def extract_true_false(text: str) -> bool | None:
    """Lenient TRUE/FALSE extraction; the last occurrence wins."""
    matches = _TRUE_FALSE.findall(strip_reasoning(text))
    if not matches:
        return None
    return matches[-1].upper() == "TRUE"


def extract_yes_no(text: str) -> bool | None:
    """Lenient yes/no extraction; the last occurrence wins."""
    matches = _YES_NO.findall(strip_reasoning(text))
    if not matches:
        return None
    return matches[-1].lower() == "yes"


def parse_headed_summary(text: str, headings: tuple[str, ...]) -> dict[str, str]:
    """Split ``### Heading`` structured output into a heading -> body map.

    Every requested heading must be present with a non-empty body.
    """
    cleaned = strip_reasoning(text)
    pattern = re.compile(
        r"^\s{0,3}#{2,4}\s*(" + "|".join(re.escape(h) for h in headings) + r")\s*$",
        re.MULTILINE | re.IGNORECASE,
    )
    matches = list(pattern.finditer(cleaned))
    found: dict[str, str] = {}
    for index, match in enumerate(matches):
        body_end = matches[index + 1].start() if index + 1 < len(matches) else len(cleaned)
        name = match.group(1).capitalize()
        found[name] = cleaned[match.end():body_end].strip()
    for heading in headings:
        if not found.get(heading, ""):
            raise ParseFailure(f'missing or empty "### {heading}" section')
    return {h: found[h] for h in headings}


def extract_single_paragraph(text: str) -> str:
    """Validate and normalize a one-paragraph synthesis response.

    Rejects empty output, multiple paragraphs, and header or meta lines.
    Line wraps within the paragraph are joined with single spaces.
    """
    cleaned = strip_reasoning(text).strip()
    if not cleaned:
        raise ParseFailure("response is empty; write exactly one paragraph")
    blocks = [b for b in re.split(r"\n\s*\n", cleaned) if b.strip()]
    if len(blocks) > 1:
        raise ParseFailure("response has multiple paragraphs; write exactly one")
    lines = [line.strip() for line in blocks[0].splitlines()]
    for line in lines:
        if line.startswith("#"):
            raise ParseFailure("response contains a header line; emit prose only")
        if re.match(r"^(OUTPUT|CONTINUATION PARAGRAPH)\s*:?\s*$", line, re.IGNORECASE):
            raise ParseFailure("response contains a meta label; emit prose only")
    return " ".join(lines)
