"""JSON decoding that remembers where each object, array and string began.

The stdlib's pure-Python scanner calls back into its decoder for objects,
arrays and strings; wrapping those callbacks is enough to tag the results
with source offsets.
"""

from __future__ import annotations

import json
import json.decoder
import json.scanner

from ..model import SourceSpan


class LocatedDict(dict):
    start = 0
    end = 0


class LocatedList(list):
    start = 0
    end = 0


class LocatedStr(str):
    start = 0
    end = 0


def _parse_object(s_and_end, *args):
    s, end = s_and_end
    obj, new_end = json.decoder.JSONObject(s_and_end, *args)
    out = LocatedDict(obj)
    out.start, out.end = end - 1, new_end
    return out, new_end


def _parse_array(s_and_end, scan_once):
    s, end = s_and_end
    arr, new_end = json.decoder.JSONArray(s_and_end, scan_once)
    out = LocatedList(arr)
    out.start, out.end = end - 1, new_end
    return out, new_end


def _parse_string(s, end, strict):
    text, new_end = json.decoder.scanstring(s, end, strict)
    out = LocatedStr(text)
    out.start, out.end = end - 1, new_end
    return out, new_end


class SpanDecoder(json.JSONDecoder):
    def __init__(self) -> None:
        super().__init__()
        self.parse_object = _parse_object
        self.parse_array = _parse_array
        self.parse_string = _parse_string
        self.scan_once = json.scanner.py_make_scanner(self)


def span_at(text: str, start: int, end: int | None = None) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    column = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(line, column, max(0, (end or start) - start))


def span_of(text: str, value) -> SourceSpan:
    if isinstance(value, (LocatedDict, LocatedList, LocatedStr)):
        return span_at(text, value.start, value.end)
    return SourceSpan(1, 1, 0)


def key_span(text: str, obj, key: str) -> SourceSpan:
    """Span of ``"key"`` inside a located object, or the object's own span."""
    if isinstance(obj, LocatedDict):
        pos = text.find(json.dumps(key), obj.start, obj.end)
        if pos >= 0:
            return span_at(text, pos, pos + len(json.dumps(key)))
    return span_of(text, obj)
