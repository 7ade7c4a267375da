"""Oracle backed by an OpenAI-compatible chat-completions endpoint."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Callable, Optional
from urllib.parse import urlparse

import httpx

from .oracle import OracleError, PromptTemplates

ENV_KEY = "NSTS_LLM_API_KEY"
ENV_ENDPOINT = "NSTS_LLM_ENDPOINT"
_LOCAL_HOSTS = {"localhost", "127.0.0.1", "::1"}
_RETRY_STATUS = {408, 429, 500, 502, 503, 504}


class ConfigError(ValueError):
    """The oracle cannot be constructed as configured."""


@dataclass
class LLMConfig:
    endpoint: str = ""
    model: str = ""
    temperature: float = 0.0
    max_tokens: int = 2048
    timeout: float = 60.0
    retries: int = 2
    backoff: float = 1.0


def _needs_key(endpoint: str) -> bool:
    return urlparse(endpoint).hostname not in _LOCAL_HOSTS


class HttpLLMOracle:
    """One blocking chat request per init/update call.

    The system message asks for the JSON guess format; the user message is
    the rendered init prompt, or the rendered intuition followed by the
    update report.  Replies are returned verbatim.
    """

    def __init__(self, cfg: LLMConfig, key: Optional[str] = None,
                 templates: Optional[PromptTemplates] = None,
                 client: Optional[httpx.Client] = None,
                 sleep: Callable[[float], None] = time.sleep):
        if not cfg.endpoint:
            raise ConfigError(f"no LLM endpoint configured (flag, config file or {ENV_ENDPOINT})")
        if not cfg.model:
            raise ConfigError("no LLM model configured")
        if key is None:
            key = os.environ.get(ENV_KEY)
        if not key and _needs_key(cfg.endpoint):
            raise ConfigError(f"endpoint {cfg.endpoint} requires an API key; set {ENV_KEY}")
        self.cfg = cfg
        self.key = key
        self.templates = templates or PromptTemplates.load()
        self.client = client or httpx.Client(timeout=cfg.timeout)
        self.sleep = sleep
        self.requests = 0

    @property
    def url(self) -> str:
        return self.cfg.endpoint.rstrip("/") + "/chat/completions"

    def _payload(self, user: str) -> dict:
        return {
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_tokens,
            "messages": [
                {"role": "system", "content": self.templates.system},
                {"role": "user", "content": user},
            ],
        }

    def chat(self, user: str) -> str:
        headers = {"Authorization": f"Bearer {self.key}"} if self.key else {}
        payload = self._payload(user)
        last = "no attempt made"
        for attempt in range(self.cfg.retries + 1):
            if attempt:
                self.sleep(self.cfg.backoff * 2 ** (attempt - 1))
            self.requests += 1
            try:
                resp = self.client.post(self.url, json=payload, headers=headers, timeout=self.cfg.timeout)
            except httpx.TransportError as e:
                last = f"{type(e).__name__}: {e}"
                continue
            if resp.status_code in _RETRY_STATUS:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise OracleError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"] or ""
            except (ValueError, KeyError, IndexError, TypeError) as e:
                raise OracleError(f"unexpected response body: {e!r}") from e
        raise OracleError(f"gave up after {self.cfg.retries + 1} attempts: {last}")

    def init(self, program: str, query: str, context: str) -> str:
        return self.chat(self.templates.render_init(program, query, context))

    def update(self, intuition: str, report: str) -> str:
        return self.chat(intuition + "\n" + report)

    def close(self) -> None:
        self.client.close()


def http_llm_oracle(endpoint: Optional[str] = None, model: str = "", key: Optional[str] = None,
                    **options) -> HttpLLMOracle:
    """Build an HTTP oracle; the endpoint falls back to the environment."""
    endpoint = endpoint or os.environ.get(ENV_ENDPOINT, "")
    templates = options.pop("templates", None)
    client = options.pop("client", None)
    sleep = options.pop("sleep", time.sleep)
    cfg = LLMConfig(endpoint=endpoint, model=model, **options)
    return HttpLLMOracle(cfg, key, templates, client, sleep)
