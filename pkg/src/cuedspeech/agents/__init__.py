from .backends import (
    AgentBackend,
    HttpChatBackend,
    MockBackend,
    RetryPolicy,
    ScriptedBackend,
    call_with_transport_retries,
)
from .cache import ResponseCache
from .hand import (
    HandPromptTemplate,
    SupportSet,
    build_hand_request,
    hand_response_schema,
    parse_hand_response,
    recognize_hands,
)
from .p2w import (
    P2wResult,
    P2wTemplate,
    build_p2w_request,
    correct_and_convert,
    p2w_response_schema,
    parse_p2w_response,
)
from .requests import BackendRequest, ImagePart, TextPart, request_hash

__all__ = [
    "AgentBackend",
    "BackendRequest",
    "HandPromptTemplate",
    "HttpChatBackend",
    "ImagePart",
    "MockBackend",
    "P2wResult",
    "P2wTemplate",
    "ResponseCache",
    "RetryPolicy",
    "ScriptedBackend",
    "SupportSet",
    "TextPart",
    "build_hand_request",
    "build_p2w_request",
    "call_with_transport_retries",
    "correct_and_convert",
    "hand_response_schema",
    "parse_hand_response",
    "parse_p2w_response",
    "p2w_response_schema",
    "recognize_hands",
    "request_hash",
]
