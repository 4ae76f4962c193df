"""On-disk formats: the textual code-spec file, node content blobs, and
help message frames.

The code-spec file is versioned JSON carrying the field, the parameters,
the star vectors as hex element lists, and a content hash over the
canonical serialization.  An 8-byte params hash derived from the same
canonical form ties blobs and frames to the code instance they belong
to, so a mismatched or corrupted artifact is always detected.
"""

from __future__ import annotations

import hashlib
import json

from .code import StarFamily, derive_params
from .errors import CorruptDataError, UsageError
from .fields import FieldSpec, decode_elements, encode_element
from .linalg import Vector
from .transforms import ShortenedCode

SPEC_FORMAT = "atrahasis-code-spec"
SPEC_VERSION = 1

BLOB_MAGIC = b"ATRA"
FRAME_MAGIC = b"ATRH"
BLOB_VERSION = 1
HEADER_LEN = 16


def _canonical_payload(doc: dict) -> bytes:
    body = {k: v for k, v in doc.items() if k != "content_hash"}
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode()


def _star_hex(vectors: list[Vector]) -> list[list[str]]:
    return [[format(v, "x") for v in vec.values] for vec in vectors]


def _star_unhex(spec: FieldSpec, rows: list[list[str]]) -> list[Vector]:
    return [Vector(spec, [int(h, 16) for h in row]) for row in rows]


def family_document(family: StarFamily, shorten_depth: int = 0) -> dict:
    """The code-spec JSON document for a star family."""
    p = family.params
    doc = {
        "format": SPEC_FORMAT,
        "version": SPEC_VERSION,
        "field": family.spec.to_dict(),
        "params": {"n": p.n, "k": p.k, "d": p.d, "t": p.t, "flavor": p.flavor},
        "x_stars": _star_hex(family.x_stars),
        "second_stars": _star_hex(family.second_stars),
    }
    if shorten_depth:
        doc["shorten"] = {
            "delta": shorten_depth,
            "pinned": list(range(p.n - shorten_depth, p.n)),
        }
    doc["content_hash"] = hashlib.sha256(_canonical_payload(doc)).hexdigest()
    return doc


def parse_document(doc: dict):
    """Validate a code-spec document; returns (family-or-shortened, params_hash)."""
    if doc.get("format") != SPEC_FORMAT:
        raise CorruptDataError(f"not a code-spec file (format={doc.get('format')!r})")
    if doc.get("version") != SPEC_VERSION:
        raise CorruptDataError(f"unsupported code-spec version {doc.get('version')!r}")
    expected = doc.get("content_hash")
    actual = hashlib.sha256(_canonical_payload(doc)).hexdigest()
    if expected != actual:
        raise CorruptDataError("code-spec content hash mismatch")
    spec = FieldSpec.from_dict(doc["field"])
    pr = doc["params"]
    params = derive_params(pr["n"], pr["k"], pr["d"], pr["flavor"])
    if pr["t"] != params.t:
        raise CorruptDataError("code-spec t disagrees with (n, k, d)")
    family = StarFamily(spec, params,
                        _star_unhex(spec, doc["x_stars"]),
                        _star_unhex(spec, doc["second_stars"]))
    code = family
    stanza = doc.get("shorten")
    if stanza:
        code = ShortenedCode(family, stanza["delta"])
        if list(code.pinned) != list(stanza["pinned"]):
            raise CorruptDataError("shorten stanza pins unexpected nodes")
    phash = hashlib.sha256(_canonical_payload(doc)).digest()[:8]
    return code, phash


def write_spec_file(path, family: StarFamily, shorten_depth: int = 0) -> dict:
    doc = family_document(family, shorten_depth)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def read_spec_file(path):
    with open(path) as fh:
        doc = json.load(fh)
    return parse_document(doc)


def params_hash(family: StarFamily) -> bytes:
    """8-byte digest binding blobs and frames to one code instance."""
    doc = family_document(family)
    return hashlib.sha256(_canonical_payload(doc)).digest()[:8]


def encode_node_blob(spec: FieldSpec, phash: bytes, node_index: int,
                     values: list[int]) -> bytes:
    """16-byte header (magic, version, node, reserved, params hash) plus
    the node's alpha elements."""
    if node_index < 0 or node_index > 0xFF:
        raise UsageError("node index does not fit the blob header")
    out = bytearray()
    out += BLOB_MAGIC
    out.append(BLOB_VERSION)
    out.append(node_index)
    out += b"\x00\x00"
    out += phash
    for v in values:
        encode_element(spec, v, out)
    return bytes(out)


def decode_node_blob(spec: FieldSpec, phash: bytes, data: bytes,
                     alpha: int) -> tuple[int, list[int]]:
    """Validate and unpack one node blob; returns (node_index, values)."""
    if len(data) != HEADER_LEN + alpha * spec.element_bytes:
        raise CorruptDataError(f"node blob has wrong length {len(data)}")
    if data[:4] != BLOB_MAGIC:
        raise CorruptDataError("node blob magic mismatch")
    if data[4] != BLOB_VERSION:
        raise CorruptDataError(f"unsupported node blob version {data[4]}")
    if data[8:16] != phash:
        raise CorruptDataError("node blob params hash mismatch")
    node_index = data[5]
    values = decode_elements(spec, data[HEADER_LEN:], alpha)
    return node_index, values


def encode_help_frame(spec: FieldSpec, phash: bytes, helper: int, failed: int,
                      values: list[int]) -> bytes:
    """16-byte header (magic, version, helper, failed, reserved, params
    hash) plus the beta message elements."""
    if not (0 <= helper <= 0xFF and 0 <= failed <= 0xFF):
        raise UsageError("node indices do not fit the frame header")
    out = bytearray()
    out += FRAME_MAGIC
    out.append(BLOB_VERSION)
    out.append(helper)
    out.append(failed)
    out.append(0)
    out += phash
    for v in values:
        encode_element(spec, v, out)
    return bytes(out)


def decode_help_frame(spec: FieldSpec, phash: bytes, data: bytes,
                      beta: int) -> tuple[int, int, list[int]]:
    if len(data) != HEADER_LEN + beta * spec.element_bytes:
        raise CorruptDataError(f"help frame has wrong length {len(data)}")
    if data[:4] != FRAME_MAGIC:
        raise CorruptDataError("help frame magic mismatch")
    if data[4] != BLOB_VERSION:
        raise CorruptDataError(f"unsupported help frame version {data[4]}")
    if data[8:16] != phash:
        raise CorruptDataError("help frame params hash mismatch")
    helper, failed = data[5], data[6]
    values = decode_elements(spec, data[HEADER_LEN:], beta)
    return helper, failed, values
