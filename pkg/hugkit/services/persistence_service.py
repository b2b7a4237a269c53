"""
State persistence: versioned JSON documents of labeled states.

Floats are written in shortest round-trip form, so a loaded state
reproduces every diagnostic of the saved one exactly.
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from pydantic import ValidationError

from hugkit.core.config import settings
from hugkit.core.exceptions import HugError, ParseError, SchemaVersionMismatchError
from hugkit.core.logging_config import get_logger
from hugkit.models.geometry import Labels, PointConfig, RawMatrix
from hugkit.models.proxy_set import ProxySet
from hugkit.models.state import LabeledState
from hugkit.schemas.state import ProxySetDocument, StateDocument

logger = get_logger(__name__)

PathLike = Union[str, Path]


def state_to_document(state: LabeledState, proxy_set: Optional[ProxySet] = None) -> StateDocument:
    proxy_doc = None
    if proxy_set is not None:
        proxy_doc = ProxySetDocument(
            strategy=proxy_set.strategy.value,
            base=proxy_set.base.points.tolist(),
            rotation_params=[] if proxy_set.rotation_params is None
            else proxy_set.rotation_params.tolist(),
        )
    return StateDocument(
        schema_version=settings.STATE_SCHEMA_VERSION,
        normalized=state.normalized,
        num_classes=state.num_classes,
        allow_empty_classes=state.labels.allow_empty,
        labels=state.labels.y.tolist(),
        features=state.X.tolist(),
        proxies=state.W.tolist(),
        proxy_set=proxy_doc,
    )


def document_to_state(doc: StateDocument) -> Tuple[LabeledState, Optional[ProxySet]]:
    """
    Rebuild the state (and proxy set, if stored) from a validated document.

    Raises:
        ParseError: If the document violates a type invariant
    """
    kind, field = (PointConfig, "points") if doc.normalized else (RawMatrix, "entries")
    try:
        state = LabeledState(
            features=kind(**{field: doc.features}),
            labels=Labels(y=doc.labels, num_classes=doc.num_classes, allow_empty=doc.allow_empty_classes),
            proxies=kind(**{field: doc.proxies}),
        )
        proxy_set = None
        if doc.proxy_set is not None:
            proxy_set = ProxySet.from_document({
                "strategy": doc.proxy_set.strategy,
                "base": {"points": doc.proxy_set.base},
                "rotation_params": doc.proxy_set.rotation_params,
            })
    except HugError as exc:
        raise ParseError(exc.message, field=exc.details.get("field"))
    except ValueError as exc:
        raise ParseError(str(exc))
    return state, proxy_set


def save_state(
    state: LabeledState,
    path: PathLike,
    proxy_set: Optional[ProxySet] = None
) -> Path:
    """
    Write a state document.

    Args:
        state: State to persist
        path: Destination file (parent directories are created)
        proxy_set: Optional proxy strategy and rotation parameters

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(state_to_document(state, proxy_set).model_dump_json(indent=2) + "\n")
    logger.debug(f"Saved state n={state.X.shape[0]} C={state.num_classes} to {path}")
    return path


def read_state(path: PathLike) -> Tuple[LabeledState, Optional[ProxySet]]:
    """
    Read a state document and its proxy set.

    Raises:
        ParseError: With line context for malformed JSON, field context for
            invalid content
        SchemaVersionMismatchError: If the document's schema version differs
            from settings.STATE_SCHEMA_VERSION
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"Cannot read {path}: {exc.strerror}")

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Malformed JSON in {path}: {exc.msg}", line=exc.lineno)
    if not isinstance(raw, dict):
        raise ParseError(f"{path} does not hold a JSON object", line=1)
    return state_from_mapping(raw)


def state_from_mapping(raw: Dict[str, Any]) -> Tuple[LabeledState, Optional[ProxySet]]:
    """
    Validate a decoded state document and rebuild the state.

    Raises:
        ParseError: With field context for invalid content
        SchemaVersionMismatchError: If the schema version is not supported
    """
    if "schema_version" not in raw:
        raise ParseError("missing schema_version", field="schema_version")
    version = raw["schema_version"]
    if version != settings.STATE_SCHEMA_VERSION:
        raise SchemaVersionMismatchError(version, settings.STATE_SCHEMA_VERSION)

    try:
        doc = StateDocument.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ParseError(f"Invalid state document: {first['msg']}", field=field)
    return document_to_state(doc)


def load_state(path: PathLike) -> LabeledState:
    """Load the LabeledState stored at path."""
    state, _ = read_state(path)
    return state
