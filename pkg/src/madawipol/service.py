"""HTTP service: configs, block-assembly sessions, joins, SVG rendering.

State is held in memory per app instance.  Sessions carry a revision counter
for optimistic concurrency: mutating requests that state a revision are
rejected with 409 when stale.  A failed join (types refuse to unify) is a
domain verdict, not an HTTP error: the response is 200 with joined=false and
the revision unchanged.

Every mutation is appended to a per-session command log so a client can fetch
the log and replay it into a fresh session; replays reproduce snapshots and
rendered bytes exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from .assembly import (
    Assembly,
    AssemblyError,
    JointRef,
    NotJoined,
    UnknownJoint,
)
from .forms import (
    InvalidConfig,
    TranslationConfig,
    config_from_json,
    config_to_json,
    default_config,
    validate_config,
)
from .render import PlaneMisses, cross_section_svg
from .textlang import AdsApply, Hole, TextLangError, parse_ads, print_ads, print_type
from .typesys import NotAnInstance, UnknownConstructor, alpha_normalize

_EMPTY_SVG = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1"/>\n'
)


class ConfigBody(BaseModel):
    config: dict


class SessionBody(BaseModel):
    configId: str


class BlockBody(BaseModel):
    consName: str


class JoinBody(BaseModel):
    male: str
    female: str
    revision: int | None = None  # omitting it skips the optimistic-concurrency check


@dataclass
class _Session:
    config_id: str
    assembly: Assembly
    revision: int = 0
    log: list = field(default_factory=list)


def _shown(t) -> str:
    return print_type(alpha_normalize(t))


def _parse_block(text: str) -> tuple[str, str | None]:
    """'Cons' or 'Cons:[List Bool]' -> constructor name and annotation text."""
    try:
        node = parse_ads(text)
    except TextLangError as exc:
        raise HTTPException(422, f"bad constructor text: {exc}") from exc
    if isinstance(node, Hole) or not isinstance(node, AdsApply) or node.args:
        raise HTTPException(422, "expected a bare constructor, possibly annotated")
    annotation = print_type(node.instance) if node.instance is not None else None
    return node.cons, annotation


def _joint_listing(asm: Assembly, iid: int) -> list[dict]:
    return [
        {
            "ref": str(ref),
            "gender": asm.joint_gender(ref),
            "type": _shown(asm.current_type(ref)),
        }
        for ref in asm.joint_refs(iid)
    ]


def create_app(configs: dict[str, TranslationConfig] | None = None) -> FastAPI:
    app = FastAPI(title="madawipol", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    store: dict[str, TranslationConfig] = {"standard": default_config()}
    if configs:
        store.update(configs)
    sessions: dict[str, _Session] = {}
    counters = {"config": 0, "session": 0}

    def get_session(sid: str) -> _Session:
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, f"no session {sid}")
        return sess

    def check_revision(sess: _Session, stated: int | None):
        if stated is not None and stated != sess.revision:
            raise HTTPException(
                409,
                {"error": "stale revision", "revision": sess.revision},
            )

    def parse_ref(text: str) -> JointRef:
        try:
            return JointRef.parse(text)
        except (ValueError, AssemblyError) as exc:
            raise HTTPException(422, f"bad joint reference {text!r}") from exc

    # -- configs ---------------------------------------------------------------

    @app.post("/configs")
    def post_config(body: ConfigBody):
        try:
            config = config_from_json(body.config)
        except InvalidConfig as exc:
            raise HTTPException(422, f"invalid config: {exc}") from exc
        violations = validate_config(config)
        if violations:
            raise HTTPException(
                422,
                {
                    "error": "config fails validation",
                    "violations": [
                        {"kind": v.kind, "subject": v.subject, "detail": v.detail}
                        for v in violations
                    ],
                },
            )
        counters["config"] += 1
        config_id = f"cfg-{counters['config']}"
        store[config_id] = config
        return {"configId": config_id}

    @app.get("/configs")
    def list_configs():
        return {"configs": sorted(store)}

    @app.get("/configs/{config_id}")
    def get_config(config_id: str):
        config = store.get(config_id)
        if config is None:
            raise HTTPException(404, f"no config {config_id}")
        return {"configId": config_id, "config": config_to_json(config)}

    # -- sessions ----------------------------------------------------------------

    @app.post("/sessions")
    def post_session(body: SessionBody):
        config = store.get(body.configId)
        if config is None:
            raise HTTPException(404, f"no config {body.configId}")
        counters["session"] += 1
        sid = f"s-{counters['session']}"
        sessions[sid] = _Session(body.configId, Assembly(config))
        return {"sessionId": sid, "revision": 0}

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        sess = get_session(sid)
        snap = sess.assembly.snapshot()
        terms = [print_ads(t) for t in sess.assembly.read_back()]
        return {
            "sessionId": sid,
            "configId": sess.config_id,
            "revision": sess.revision,
            "terms": terms,
            **snap,
        }

    @app.get("/sessions/{sid}/log")
    def get_log(sid: str):
        sess = get_session(sid)
        return {"sessionId": sid, "revision": sess.revision, "commands": list(sess.log)}

    # -- blocks ------------------------------------------------------------------

    @app.post("/sessions/{sid}/blocks")
    def post_block(sid: str, body: BlockBody):
        sess = get_session(sid)
        cons, annotation = _parse_block(body.consName)
        try:
            iid = sess.assembly.add_m_constructor(cons, annotation)
        except UnknownConstructor as exc:
            raise HTTPException(422, str(exc)) from exc
        except NotAnInstance as exc:
            raise HTTPException(422, f"annotation rejected: {exc}") from exc
        sess.revision += 1
        sess.log.append({"op": "block", "consName": body.consName})
        return {
            "instanceId": iid,
            "revision": sess.revision,
            "joints": _joint_listing(sess.assembly, iid),
        }

    # -- joins -------------------------------------------------------------------

    @app.post("/sessions/{sid}/joins")
    def post_join(sid: str, body: JoinBody):
        sess = get_session(sid)
        check_revision(sess, body.revision)
        male = parse_ref(body.male)
        female = parse_ref(body.female)
        try:
            result = sess.assembly.try_join(male, female)
        except UnknownJoint as exc:
            raise HTTPException(404, str(exc)) from exc
        except AssemblyError as exc:
            raise HTTPException(422, str(exc)) from exc
        if not result.joined:
            return {"joined": False, "delta": {}, "revision": sess.revision}
        sess.revision += 1
        sess.log.append({"op": "join", "male": str(male), "female": str(female)})
        delta = {str(ref): _shown(t) for ref, t in sorted(result.changed.items())}
        return {"joined": True, "delta": delta, "revision": sess.revision}

    @app.delete("/sessions/{sid}/joins/{male_ref}")
    def delete_join(sid: str, male_ref: str, revision: int | None = None):
        sess = get_session(sid)
        check_revision(sess, revision)
        male = parse_ref(male_ref)
        try:
            result = sess.assembly.unjoin(male)
        except NotJoined as exc:
            raise HTTPException(404, str(exc)) from exc
        except UnknownJoint as exc:
            raise HTTPException(404, str(exc)) from exc
        sess.revision += 1
        sess.log.append({"op": "unjoin", "male": str(male)})
        delta = {str(ref): _shown(t) for ref, t in sorted(result.changed.items())}
        return {"removed": True, "delta": delta, "revision": sess.revision}

    # -- rendering -----------------------------------------------------------------

    @app.get("/sessions/{sid}/render.svg")
    def get_render(sid: str):
        sess = get_session(sid)
        try:
            svg = cross_section_svg(sess.assembly.config, sess.assembly)
        except PlaneMisses:
            svg = _EMPTY_SVG
        return Response(content=svg, media_type="image/svg+xml")

    return app


def serve(host: str = "127.0.0.1", port: int = 8571,
          configs: dict[str, TranslationConfig] | None = None):
    import uvicorn

    uvicorn.run(create_app(configs), host=host, port=port, log_level="warning")
