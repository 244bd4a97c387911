"""Dataset chatbot: digest-grounded conversations over a completion client."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace

from fails.llm.client import CompletionClient, CompletionRequest
from fails.llm.digest import DatasetDigest

ROLE_USER = "user"
ROLE_ASSISTANT = "assistant"

_SYSTEM_PREFIX = (
    "You are a helpful analyst chatbot for a dataset of self-disclosed LLM-service "
    "incident reports. Answer strictly from the digest below; say so when the "
    "digest cannot answer a question.\n\n"
)


@dataclass(frozen=True)
class ChatSession:
    session_id: str
    digest: DatasetDigest
    history: tuple[tuple[str, str], ...] = ()


def new_session(digest: DatasetDigest) -> ChatSession:
    return ChatSession(session_id=uuid.uuid4().hex, digest=digest, history=())


def _transcript(history: tuple[tuple[str, str], ...], user_message: str) -> str:
    if not history:
        return user_message
    lines = ["Conversation so far:"]
    lines.extend(f"{role}: {text}" for role, text in history)
    lines += ["", f"user: {user_message}"]
    return "\n".join(lines)


def chat(
    client: CompletionClient, session: ChatSession, user_message: str
) -> tuple[str, ChatSession]:
    """Send one message; returns the reply and the extended session.

    The input session is never mutated, so a client failure leaves the
    caller's history exactly as it was.
    """
    request = CompletionRequest(
        system_text=_SYSTEM_PREFIX + session.digest.to_text(),
        user_text=_transcript(session.history, user_message),
    )
    response = client.complete(request)
    updated = replace(
        session,
        history=session.history + ((ROLE_USER, user_message), (ROLE_ASSISTANT, response.text)),
    )
    return response.text, updated
