# Copyright The Caikit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Chat backend talking to an OpenAI-compatible /chat/completions endpoint"""

# Standard
from typing import Any, Callable, Dict, List, Optional
import os
import time

# Third Party
import httpx

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import ChatExchange, ChatMessage, ModelConfig, TokenUsage
from ...exceptions import AuthError, MalformedResponse, RateLimited, TransportError
from ...toolkit.trace_utils import messages_payload
from .base import ChatBackendBase

log = alog.use_channel("OAICOMPAT")
error = error_handler.get(log)

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class OpenAICompatBackend(ChatBackendBase):
    """Remote backend with bounded retries and an overall per-call deadline.

    The httpx client, the sleep function and the clock are injectable so the
    retry policy can be exercised without a network or real waiting.
    """

    def __init__(
        self,
        endpoint_url: Optional[str] = None,
        client: Optional[httpx.Client] = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        super().__init__()
        self._endpoint_url = endpoint_url
        self._client = client or httpx.Client()
        self._sleep = sleep
        self._clock = clock

    @property
    def endpoint(self) -> str:
        return self._endpoint_url or "openai-compatible"

    def _url(self, config: ModelConfig) -> str:
        base = config.endpoint_url or self._endpoint_url
        error.value_check(
            "<RRR66103472E>", bool(base), "No endpoint_url configured"
        )
        return base.rstrip("/") + "/chat/completions"

    @staticmethod
    def _payload(config: ModelConfig, messages: List[ChatMessage]) -> Dict[str, Any]:
        return {
            "model": config.model_name,
            "messages": messages_payload(messages),
            "temperature": config.temperature,
            "top_p": config.top_p,
            "max_tokens": config.max_output_tokens,
            "stream": False,
        }

    def _complete(
        self, config: ModelConfig, messages: List[ChatMessage]
    ) -> ChatExchange:
        url = self._url(config)
        api_key = os.environ.get(config.api_key_ref or "")
        if not api_key:
            error(
                "<RRR66103473E>",
                AuthError(
                    f"Environment variable {config.api_key_ref!r} is not set",
                    endpoint=url,
                    attempts=0,
                ),
            )
        headers = {"Authorization": f"Bearer {api_key}"}
        payload = self._payload(config, messages)

        start = self._clock()
        last_failure = "no attempt made"
        rate_limited = False
        attempt = 0
        while attempt < config.max_retries:
            remaining = config.deadline_seconds - (self._clock() - start)
            if remaining <= 0:
                last_failure = f"deadline of {config.deadline_seconds}s exceeded"
                break
            attempt += 1
            log.debug2("POST %s attempt %d", url, attempt)
            try:
                response = self._client.post(
                    url,
                    json=payload,
                    headers=headers,
                    timeout=min(config.timeout_seconds, remaining),
                )
            except httpx.HTTPError as err:
                last_failure = f"{type(err).__name__}: {err}"
                rate_limited = False
            else:
                if response.status_code in (401, 403):
                    error(
                        "<RRR66103474E>",
                        AuthError(
                            f"Endpoint rejected the credentials "
                            f"(HTTP {response.status_code})",
                            endpoint=url,
                            attempts=attempt,
                        ),
                    )
                if response.status_code == 200:
                    return self._parse(
                        response, messages, url, attempt, self._clock() - start
                    )
                if response.status_code not in _RETRYABLE_STATUS:
                    error(
                        "<RRR66103475E>",
                        TransportError(
                            f"Request failed with HTTP {response.status_code}",
                            endpoint=url,
                            attempts=attempt,
                        ),
                    )
                rate_limited = response.status_code == 429
                last_failure = f"HTTP {response.status_code}"

            if attempt < config.max_retries:
                delay = config.backoff_seconds * (2 ** (attempt - 1))
                remaining = config.deadline_seconds - (self._clock() - start)
                log.debug(
                    "<RRR66103476D>",
                    f"Retrying {url} after {last_failure} in {delay:.2f}s",
                )
                self._sleep(max(0.0, min(delay, remaining)))

        if rate_limited:
            error(
                "<RRR66103477E>",
                RateLimited(
                    f"Rate limited: {last_failure}", endpoint=url, attempts=attempt
                ),
            )
        error(
            "<RRR66103478E>",
            TransportError(
                f"Request failed: {last_failure}", endpoint=url, attempts=attempt
            ),
        )

    @staticmethod
    def _parse(
        response: httpx.Response,
        messages: List[ChatMessage],
        url: str,
        attempts: int,
        latency: float,
    ) -> ChatExchange:
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as err:
            error(
                "<RRR66103479E>",
                MalformedResponse(
                    f"Unexpected completion payload: {err}",
                    endpoint=url,
                    attempts=attempts,
                ),
            )
        if not isinstance(content, str):
            error(
                "<RRR66103480E>",
                MalformedResponse(
                    "Completion content is not a string",
                    endpoint=url,
                    attempts=attempts,
                ),
            )
        usage = None
        if isinstance(body.get("usage"), dict):
            usage = TokenUsage(
                prompt_tokens=int(body["usage"].get("prompt_tokens", 0)),
                completion_tokens=int(body["usage"].get("completion_tokens", 0)),
                total_tokens=int(body["usage"].get("total_tokens", 0)),
            )
        return ChatExchange(
            messages=list(messages),
            response_text=content,
            usage=usage,
            latency_seconds=latency,
        )
