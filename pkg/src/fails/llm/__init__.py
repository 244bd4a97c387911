"""LLM-backed interpretation: prompts, clients, dataset digest, chat."""

from fails.llm.chat import ChatSession, chat, new_session
from fails.llm.client import (
    ClientError,
    CompletionClient,
    CompletionRequest,
    CompletionResponse,
    EmptyResponse,
    MockClient,
    RemoteClient,
)
from fails.llm.digest import DatasetDigest, build_dataset_digest
from fails.llm.prompts import (
    PlotAnalysisPrompt,
    analyze_all,
    analyze_plot,
    build_plot_prompt,
)

__all__ = [
    "ChatSession",
    "ClientError",
    "CompletionClient",
    "CompletionRequest",
    "CompletionResponse",
    "DatasetDigest",
    "EmptyResponse",
    "MockClient",
    "PlotAnalysisPrompt",
    "RemoteClient",
    "analyze_all",
    "analyze_plot",
    "build_dataset_digest",
    "build_plot_prompt",
    "chat",
    "new_session",
]
