"""Tests for the OpenAI-compatible backend.

Every request goes to an httpx.MockTransport, so no network is needed.
"""
# Standard
import itertools
import json

# Third Party
import httpx
import pytest

# Local
from caikit_multihop.data_model import ModelConfig
from caikit_multihop.exceptions import (
    AuthError,
    MalformedResponse,
    RateLimited,
    TransportError,
)
from caikit_multihop.resources.chat_backend import OpenAICompatBackend

## Setup ########################################################################

API_KEY_ENV = "MULTIHOP_TEST_API_KEY"
ENDPOINT = "http://llm.test/v1"
MESSAGES = [("system", "Be brief."), ("user", "Capital of France?")]


def _config(**overrides):
    values = {
        "model_name": "test-model",
        "endpoint_url": ENDPOINT,
        "api_key_ref": API_KEY_ENV,
        "max_retries": 3,
        "backoff_seconds": 1.0,
    }
    values.update(overrides)
    return ModelConfig(**values)


def _completion(content="Paris", usage=True):
    body = {"choices": [{"message": {"role": "assistant", "content": content}}]}
    if usage:
        body["usage"] = {"prompt_tokens": 9, "completion_tokens": 1, "total_tokens": 10}
    return body


class Server:
    """Replays queued responses and keeps the requests it received"""

    def __init__(self, *responses):
        self.responses = list(responses)
        self.requests = []

    def __call__(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(request)
        response = self.responses.pop(0)
        if isinstance(response, Exception):
            raise response
        return response


def _backend(server, clock=lambda: 0.0):
    sleeps = []
    backend = OpenAICompatBackend(
        client=httpx.Client(transport=httpx.MockTransport(server)),
        sleep=sleeps.append,
        clock=clock,
    )
    return backend, sleeps


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv(API_KEY_ENV, "sk-test")


## Tests ########################################################################


def test_successful_completion(api_key):
    server = Server(httpx.Response(200, json=_completion()))
    backend, sleeps = _backend(server)
    exchange = backend.complete(_config(), MESSAGES)

    assert exchange.response_text == "Paris"
    assert exchange.usage.total_tokens == 10
    assert sleeps == []
    request = server.requests[0]
    assert str(request.url) == f"{ENDPOINT}/chat/completions"
    assert request.headers["Authorization"] == "Bearer sk-test"
    payload = json.loads(request.content)
    assert payload["model"] == "test-model"
    assert payload["temperature"] == 0.3
    assert payload["messages"][-1] == {"role": "user", "content": "Capital of France?"}
    assert payload["stream"] is False


def test_usage_is_optional(api_key):
    server = Server(httpx.Response(200, json=_completion(usage=False)))
    exchange = _backend(server)[0].complete(_config(), MESSAGES)
    assert exchange.usage is None


def test_server_errors_are_retried_with_backoff(api_key):
    server = Server(
        httpx.Response(500),
        httpx.Response(503),
        httpx.Response(200, json=_completion()),
    )
    backend, sleeps = _backend(server)
    assert backend.complete(_config(), MESSAGES).response_text == "Paris"
    assert sleeps == [1.0, 2.0]
    assert len(server.requests) == 3


def test_connection_errors_are_retried(api_key):
    server = Server(
        httpx.ConnectError("connection refused"),
        httpx.Response(200, json=_completion()),
    )
    backend, _ = _backend(server)
    assert backend.complete(_config(), MESSAGES).response_text == "Paris"


def test_rate_limit_exhausts_retries(api_key):
    server = Server(*[httpx.Response(429) for _ in range(3)])
    backend, sleeps = _backend(server)
    with pytest.raises(RateLimited) as exc_info:
        backend.complete(_config(), MESSAGES)
    assert exc_info.value.attempts == 3
    assert exc_info.value.endpoint == f"{ENDPOINT}/chat/completions"
    assert sleeps == [1.0, 2.0]


def test_transport_failure_after_retries(api_key):
    server = Server(*[httpx.Response(502) for _ in range(2)])
    backend, _ = _backend(server)
    with pytest.raises(TransportError) as exc_info:
        backend.complete(_config(max_retries=2), MESSAGES)
    assert exc_info.value.attempts == 2


@pytest.mark.parametrize("status", [401, 403])
def test_rejected_credentials_are_not_retried(api_key, status):
    server = Server(httpx.Response(status))
    backend, sleeps = _backend(server)
    with pytest.raises(AuthError):
        backend.complete(_config(), MESSAGES)
    assert len(server.requests) == 1
    assert sleeps == []


def test_client_errors_are_not_retried(api_key):
    server = Server(httpx.Response(404))
    backend, _ = _backend(server)
    with pytest.raises(TransportError) as exc_info:
        backend.complete(_config(), MESSAGES)
    assert exc_info.value.attempts == 1


def test_missing_api_key(monkeypatch):
    monkeypatch.delenv(API_KEY_ENV, raising=False)
    server = Server()
    backend, _ = _backend(server)
    with pytest.raises(AuthError) as exc_info:
        backend.complete(_config(), MESSAGES)
    assert exc_info.value.attempts == 0
    assert server.requests == []


@pytest.mark.parametrize(
    "response",
    [
        httpx.Response(200, json={"choices": []}),
        httpx.Response(200, json={"choices": [{"message": {"content": None}}]}),
        httpx.Response(200, content=b"<html>not json</html>"),
    ],
)
def test_malformed_payload(api_key, response):
    backend, _ = _backend(Server(response))
    with pytest.raises(MalformedResponse):
        backend.complete(_config(), MESSAGES)


def test_deadline_stops_retries(api_key):
    """Once the deadline has passed no further attempt is made"""
    clock = itertools.chain([0.0, 0.0], itertools.repeat(300.0)).__next__
    server = Server(httpx.Response(500), httpx.Response(200, json=_completion()))
    backend, _ = _backend(server, clock=clock)
    with pytest.raises(TransportError) as exc_info:
        backend.complete(_config(deadline_seconds=240), MESSAGES)
    assert exc_info.value.attempts == 1
    assert len(server.requests) == 1


def test_missing_endpoint(api_key):
    backend, _ = _backend(Server())
    with pytest.raises(ValueError):
        backend.complete(_config(endpoint_url=""), MESSAGES)
