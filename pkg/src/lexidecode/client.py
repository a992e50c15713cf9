"""Client for the decoding service.

By default requests are dispatched in process against a freshly created
app over httpx's ASGI transport, so the command line works with no server
running.  Pass a base URL to talk to a remote instance instead; the
payloads and error mapping are identical either way.
"""

from __future__ import annotations

import asyncio
from typing import Any

import httpx

TIMEOUT = httpx.Timeout(300.0)


class ServiceError(Exception):
    """A non-2xx service response, carrying the error kind from the body
    ("invalid_input", "cap_exceeded", "not_found", ...)."""

    def __init__(self, status_code: int, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.status_code = status_code
        self.kind = kind
        self.message = message


def _error_from(response: httpx.Response) -> ServiceError:
    kind = "error"
    message = response.text
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        kind = str(detail.get("kind", kind))
        message = str(detail.get("message", message))
    elif detail is not None:
        # FastAPI's own validation errors (422) carry a list or string.
        kind = "invalid_input"
        message = str(detail)
    return ServiceError(response.status_code, kind, message)


class ServiceClient:
    def __init__(self, base_url: str | None = None):
        self._base_url = base_url
        if base_url is None:
            from .service import create_app

            self._app = create_app()

    def _request(self, method: str, path: str, payload: Any | None = None) -> Any:
        if self._base_url is not None:
            with httpx.Client(base_url=self._base_url, timeout=TIMEOUT) as client:
                response = client.request(method, path, json=payload)
        else:

            async def go() -> httpx.Response:
                transport = httpx.ASGITransport(app=self._app)
                async with httpx.AsyncClient(
                    transport=transport, base_url="http://lexidecode", timeout=TIMEOUT
                ) as client:
                    return await client.request(method, path, json=payload)

            response = asyncio.run(go())
        if response.status_code >= 400:
            raise _error_from(response)
        if response.status_code == 204 or not response.content:
            return None
        return response.json()

    def health(self) -> dict:
        return self._request("GET", "/health")

    def create_decoder(self, spec: dict) -> dict:
        return self._request("POST", "/decoders", spec)

    def read_decoder(self, decoder_id: str) -> dict:
        return self._request("GET", f"/decoders/{decoder_id}")

    def delete_decoder(self, decoder_id: str) -> None:
        self._request("DELETE", f"/decoders/{decoder_id}")

    def decode(self, decoder_id: str, request: dict) -> dict:
        return self._request("POST", f"/decoders/{decoder_id}/decode", request)

    def cer(self, pairs: list[tuple[str, str]]) -> dict:
        return self._request("POST", "/metrics/cer", {"pairs": pairs})

    def wer(self, pairs: list[tuple[str, str]], word_chars: str) -> dict:
        return self._request("POST", "/metrics/wer", {"pairs": pairs, "word_chars": word_chars})

    def improvement(self, baseline: float, improved: float) -> dict:
        return self._request(
            "POST", "/metrics/improvement", {"baseline": baseline, "improved": improved}
        )

    def run_decode(self, payload: dict) -> dict:
        return self._request("POST", "/runs/decode", payload)

    def run_eval(self, payload: dict) -> dict:
        return self._request("POST", "/runs/eval", payload)
