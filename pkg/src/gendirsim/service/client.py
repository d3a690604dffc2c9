"""Client for the service, in-process by default, HTTP when given a URL.

Both modes go through the same schema models and handler functions, so a
CLI invocation produces identical artifacts whether or not a server sits
in between.
"""

import httpx

from . import app as app_module
from . import schemas


class ServiceError(RuntimeError):
    """Request rejected or failed; carries the HTTP-style status code."""

    def __init__(self, status_code, detail):
        self.status_code = status_code
        self.detail = detail
        super().__init__(f"service error {status_code}: {detail}")


class ServiceClient:
    """Calls handlers directly, or POSTs to ``base_url`` when given one."""

    def __init__(self, base_url=None, *, timeout=600.0):
        self.base_url = base_url.rstrip("/") if base_url else None
        self._timeout = timeout

    def _post(self, path, request_model, response_cls, handler):
        if self.base_url is None:
            return self._local(handler, request_model)
        with httpx.Client(base_url=self.base_url, timeout=self._timeout) as web:
            resp = web.post(path, json=request_model.model_dump(mode="json"))
            return self._parse(resp, response_cls)

    def _local(self, handler, *args):
        from fastapi import HTTPException

        try:
            return handler(*args)
        except HTTPException as exc:
            raise ServiceError(exc.status_code, exc.detail) from exc

    def _parse(self, resp, response_cls):
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise ServiceError(resp.status_code, detail)
        return response_cls.model_validate(resp.json())

    def simulate(self, request: schemas.SimulateRequest) -> schemas.SimulateResponse:
        return self._post(
            "/simulate", request, schemas.SimulateResponse, app_module.handle_simulate
        )

    def preset(self, case: int) -> schemas.SimulateRequest:
        if self.base_url is None:
            return self._local(app_module.handle_preset, case)
        with httpx.Client(base_url=self.base_url, timeout=self._timeout) as web:
            return self._parse(
                web.get(f"/presets/appendix-b/{case}"), schemas.SimulateRequest
            )

    def moments(self, request: schemas.MomentsRequest) -> schemas.MomentsResponse:
        return self._post(
            "/moments", request, schemas.MomentsResponse, app_module.handle_moments
        )

    def density(self, request: schemas.DensityRequest) -> schemas.DensityResponse:
        return self._post(
            "/density", request, schemas.DensityResponse, app_module.handle_density
        )

    def map(self, request: schemas.MapRequest) -> schemas.MapResponse:
        return self._post(
            "/map", request, schemas.MapResponse, app_module.handle_map
        )

    def verify_potential(
        self, request: schemas.VerifyPotentialRequest
    ) -> schemas.VerifyPotentialResponse:
        return self._post(
            "/verify-potential",
            request,
            schemas.VerifyPotentialResponse,
            app_module.handle_verify_potential,
        )
