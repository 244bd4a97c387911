"""Prompt construction for single-plot and bulk plot analysis.

Instruction texts live in a versioned config file so prompt wording can be
tuned without code changes. Rendered prompts are brace-free by construction,
which makes "fully substituted" checkable with a plain scan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from fails.llm.client import CompletionClient, CompletionRequest, EmptyResponse
from fails.model import format_ts
from fails.plots.kinds import PlotKind, PlotSpec, RenderedPlot


def _load_prompt_config() -> dict:
    raw = resources.files("fails.config").joinpath("prompts.json").read_text("utf-8")
    return json.loads(raw)


_CONFIG = _load_prompt_config()

WORD_CAP: int = _CONFIG["word_cap"]
IMPACT_DEFINITION: str = _CONFIG["impact_definition"]
_IMPACT_KINDS = {PlotKind.INCIDENT_IMPACT_DISTRIBUTION}


def _structure_directive() -> str:
    return _CONFIG["structure_directive"].replace("WORD_CAP", str(WORD_CAP))


def _token_cap(words: int) -> int:
    # rough 2 tokens per word leaves room for formatting
    return words * 2


@dataclass(frozen=True)
class PlotAnalysisPrompt:
    instruction: str
    kind: PlotKind
    date_range: str
    selected_services: tuple[str, ...]
    impact_definition: str
    statistical_measures: dict[str, float]
    structure_directive: str

    def rendered(self) -> str:
        lines = [
            self.instruction,
            "",
            f"Plot kind: {self.kind.value}",
            f"Date range: {self.date_range}",
            "Selected services: " + ", ".join(self.selected_services),
        ]
        if self.impact_definition:
            lines.append(f"The impact levels are defined as: {self.impact_definition}")
        lines.append("The calculated statistical metrics are:")
        for key in sorted(self.statistical_measures):
            lines.append(f"- {key} = {self.statistical_measures[key]}")
        lines += ["", self.structure_directive]
        return "\n".join(lines)


def build_plot_prompt(kind: PlotKind, spec: PlotSpec) -> PlotAnalysisPrompt:
    """Assemble the analysis prompt for one plot from its spec."""
    if spec.kind != kind:
        raise ValueError(f"spec is for {spec.kind.value}, not {kind.value}")
    date_range = f"{format_ts(spec.selection.start)} to {format_ts(spec.selection.end)}"
    return PlotAnalysisPrompt(
        instruction=_CONFIG["instructions"][kind.value],
        kind=kind,
        date_range=date_range,
        selected_services=tuple(sorted(spec.selection.services)),
        impact_definition=IMPACT_DEFINITION if kind in _IMPACT_KINDS else "",
        statistical_measures=dict(spec.stats_sidecar),
        structure_directive=_structure_directive(),
    )


_SYSTEM_TEXT = (
    "You are a reliability analyst. You are shown plots generated from a dataset "
    "of self-disclosed incident reports of LLM services, together with the exact "
    "statistics behind them. Ground every claim in the numbers provided."
)


def analyze_plot(client: CompletionClient, plot: RenderedPlot, spec: PlotSpec) -> str:
    """Run one plot through the completion client and return the analysis."""
    if plot.kind != spec.kind:
        raise ValueError(f"plot is {plot.kind.value} but spec is {spec.kind.value}")
    prompt = build_plot_prompt(spec.kind, spec)
    response = client.complete(
        CompletionRequest(
            system_text=_SYSTEM_TEXT,
            user_text=prompt.rendered(),
            images=(plot,),
            max_output_tokens=_token_cap(WORD_CAP),
        )
    )
    if not response.text:
        raise EmptyResponse("analysis completion was empty")
    return response.text


def analyze_all(
    client: CompletionClient, plots: dict[PlotKind, tuple[RenderedPlot, PlotSpec]]
) -> str:
    """Analyze every given plot in one request, stats concatenated kind order."""
    if not plots:
        raise ValueError("plots must be non-empty")
    sections = [_CONFIG["bulk_directive"], ""]
    images = []
    for kind in sorted(plots, key=lambda k: k.value):
        plot, spec = plots[kind]
        prompt = build_plot_prompt(kind, spec)
        sections.append(f"## {kind.value}")
        sections.append(prompt.rendered())
        sections.append("")
        images.append(plot)
    response = client.complete(
        CompletionRequest(
            system_text=_SYSTEM_TEXT,
            user_text="\n".join(sections),
            images=tuple(images),
            max_output_tokens=_token_cap(WORD_CAP) + 60 * len(plots),
        )
    )
    if not response.text:
        raise EmptyResponse("bulk analysis completion was empty")
    return response.text
