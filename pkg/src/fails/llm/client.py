"""Completion clients: a remote HTTP chat-completions client and the
deterministic mock used by tests and offline runs.

The mock echoes the factual lines of its inputs (anything that looks like a
label, a key=value pair, or a heading), so every number in a mock reply is
traceable to the prompt that produced it.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional, Protocol

import httpx

from fails.plots.kinds import RenderedPlot

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-4o-mini"

API_KEY_ENV = "FAILS_LLM_API_KEY"
MODEL_ENV = "FAILS_LLM_MODEL"
ENDPOINT_ENV = "FAILS_LLM_ENDPOINT"
DEBUG_ENV = "FAILS_LLM_DEBUG"


class ClientError(Exception):
    pass


class EmptyResponse(ClientError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    system_text: str
    user_text: str
    images: tuple[RenderedPlot, ...] = ()
    max_output_tokens: Optional[int] = None


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    usage: dict = field(default_factory=dict)


class CompletionClient(Protocol):
    def complete(self, request: CompletionRequest) -> CompletionResponse: ...


_FACT_MARKERS = (":", "=")


class MockClient:
    """Deterministic offline client: replies echo the request's fact lines."""

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        lines = [f"image: {img.kind.value}" for img in request.images]
        for raw in (request.system_text + "\n" + request.user_text).splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#") or line.startswith("-"):
                lines.append(line)
            elif any(marker in line for marker in _FACT_MARKERS):
                lines.append(line)

        digest = hashlib.sha256(
            (request.system_text + "\x00" + request.user_text).encode("utf-8")
        ).hexdigest()[:12]
        text = "Mock analysis.\n" + "\n".join(lines) + f"\n[mock {digest}]"
        if request.max_output_tokens is not None:
            text = text[: request.max_output_tokens * 4]
        return CompletionResponse(text=text, usage={"mock": 1})


class RemoteClient:
    """HTTP chat-completions client with base64 image attachments.

    Model, endpoint and key come from FAILS_LLM_MODEL, FAILS_LLM_ENDPOINT and
    FAILS_LLM_API_KEY unless given explicitly. Missing credentials fail fast,
    before any network call.
    """

    def __init__(
        self,
        api_key: Optional[str] = None,
        model: Optional[str] = None,
        endpoint: Optional[str] = None,
        timeout: float = 60.0,
    ):
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.model = model or os.environ.get(MODEL_ENV, "") or DEFAULT_MODEL
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV, "") or DEFAULT_ENDPOINT
        self.timeout = timeout

    def _build_body(self, request: CompletionRequest) -> dict:
        user_content: list = [{"type": "text", "text": request.user_text}]
        for image in request.images:
            mime = "image/svg+xml" if image.format.value == "svg" else "image/png"
            encoded = base64.b64encode(image.data).decode("ascii")
            user_content.append(
                {"type": "image_url", "image_url": {"url": f"data:{mime};base64,{encoded}"}}
            )
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": user_content},
            ],
        }
        if request.max_output_tokens is not None:
            body["max_tokens"] = request.max_output_tokens
        return body

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        if not self.api_key:
            raise ClientError(f"auth: {API_KEY_ENV} is not set")
        body = self._build_body(request)
        if os.environ.get(DEBUG_ENV) == "1":
            logger.info(
                "llm request to %s: %s",
                self.endpoint,
                json.dumps(body)[:2000].replace(self.api_key, "<redacted>"),
            )
        try:
            response = httpx.post(
                self.endpoint,
                json=body,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
            response.raise_for_status()
            data = response.json()
        except httpx.HTTPError as exc:
            raise ClientError(f"upstream LLM call failed: {exc}") from exc
        except ValueError as exc:
            raise ClientError(f"upstream returned non-JSON body: {exc}") from exc

        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ClientError(f"unexpected completion payload shape: {exc}") from exc
        if os.environ.get(DEBUG_ENV) == "1":
            logger.info("llm response: %s", json.dumps(data)[:2000])
        if not text:
            raise EmptyResponse("completion contained no text")
        return CompletionResponse(text=text, usage=data.get("usage", {}))
