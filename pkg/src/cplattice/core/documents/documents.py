import hashlib
from typing import Union

from pydantic import TypeAdapter
from pydantic_core import from_json

from .exceptions import MissingParamsException
from .models import ChannelDocument, ParamsDocument, ResultDocument

CHANNEL_DOCUMENT_ADAPTER: TypeAdapter = TypeAdapter(ChannelDocument)


def input_digest(data: Union[bytes, str]) -> str:
    """SHA-256 hex digest of the raw input."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def parse_channel_document(data: Union[bytes, str]) -> ChannelDocument:
    """
    Raises:
        ValidationError: If the text is not JSON or does not match any channel document
        PayloadShapeException: If a matrix does not fit the declared n
    """
    return CHANNEL_DOCUMENT_ADAPTER.validate_json(data)


def parse_params_document(data: Union[bytes, str]) -> ParamsDocument:
    """
    Read a bare params object, or the params of a full result document.

    Raises:
        ValueError: If the text is not JSON or matches neither shape
        MissingParamsException: If a result document carries no params
    """
    raw = from_json(data)
    if isinstance(raw, dict) and "metadata" in raw:
        result = ResultDocument.model_validate(raw)
        if result.params is None:
            raise MissingParamsException("Result document carries no params (was the map CP?)")
        return result.params
    return ParamsDocument.model_validate(raw)
