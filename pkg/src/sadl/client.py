"""Thin client for the service.

With a base URL the client speaks real HTTP; without one it mounts the
FastAPI app over an in-process ASGI transport, so CLI commands work with no
running server while exercising exactly the same routes and schemas.
"""

import asyncio

import httpx


class ServiceClient:
    def __init__(self, base_url: str | None = None):
        self.base_url = base_url

    def post(self, path: str, payload: dict):
        """POST JSON; returns (status_code, parsed body)."""
        return self._request("POST", path, payload)

    def get(self, path: str):
        return self._request("GET", path, None)

    def _request(self, method: str, path: str, payload):
        if self.base_url is not None:
            with httpx.Client(base_url=self.base_url, timeout=None) as client:
                resp = client.request(method, path, json=payload)
                return resp.status_code, resp.json()
        return asyncio.run(self._request_inprocess(method, path, payload))

    async def _request_inprocess(self, method: str, path: str, payload):
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://sadl.inprocess", timeout=None
        ) as client:
            resp = await client.request(method, path, json=payload)
            return resp.status_code, resp.json()
