"""Shared fixtures: the demo survey, scripted generators, tiny documents."""

from __future__ import annotations

import pytest

from dynsurvey import demo
from dynsurvey.corpus import PaperRecord, PaperSummary
from dynsurvey.document import SurveyState
from dynsurvey.endpoints import GenerationRequest
from dynsurvey.mock import HashEmbedding, ScriptedGeneration


class RecordingGenerator:
    """Wraps a generator and keeps every request for assertions."""

    def __init__(self, inner: ScriptedGeneration):
        self.inner = inner
        self.requests: list[GenerationRequest] = []

    @property
    def max_retries(self) -> int:
        return self.inner.max_retries

    def generate(self, request: GenerationRequest) -> str:
        self.requests.append(request)
        return self.inner.generate(request)


def make_generator(flat: dict[str, str], max_retries: int = 1) -> ScriptedGeneration:
    return ScriptedGeneration.from_flat(flat, max_retries=max_retries)


def make_paper(paper_id: str = "p1", **overrides) -> PaperRecord:
    values = dict(
        id=paper_id,
        title=f"Paper {paper_id}",
        abstract=f"Abstract of {paper_id} about denoising.",
        full_text=f"Full text of {paper_id}. It proposes a denoising method.",
        venue="CVPR",
        date="2024-01-01",
        categories=("cs.CV",),
        bib={"key": f"key_{paper_id}", "title": f"Paper {paper_id}", "year": "2024"},
    )
    values.update(overrides)
    return PaperRecord(**values)


def make_summary(paper_id: str = "p1") -> PaperSummary:
    return PaperSummary(
        methods=f"Methods of {paper_id}.",
        novelty=f"Novelty of {paper_id}.",
        results=f"Results of {paper_id}.",
        source_paper_id=paper_id,
    )


@pytest.fixture
def full_state() -> SurveyState:
    return demo.demo_full_state()


@pytest.fixture
def demo_instance():
    return demo.demo_instance()


@pytest.fixture
def demo_generator() -> ScriptedGeneration:
    scenario = demo.demo_scenario()
    return ScriptedGeneration.from_flat(scenario["generation"],
                                        max_retries=scenario["generation_max_retries"])


@pytest.fixture
def hash_embedder() -> HashEmbedding:
    return HashEmbedding(seed=7, dimension=64)
