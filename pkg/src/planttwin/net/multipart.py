"""multipart/form-data encoding and decoding for frame uploads."""
from __future__ import annotations

import secrets
from dataclasses import dataclass

from planttwin.net.http import BadRequest


@dataclass
class Part:
    name: str
    data: bytes
    filename: str | None = None
    content_type: str | None = None


def build_multipart(parts: list[Part]) -> tuple[str, bytes]:
    """Return (content-type header value, encoded body)."""
    boundary = "planttwin-" + secrets.token_hex(12)
    chunks: list[bytes] = []
    for part in parts:
        disposition = f'form-data; name="{part.name}"'
        if part.filename:
            disposition += f'; filename="{part.filename}"'
        head = f"--{boundary}\r\ncontent-disposition: {disposition}\r\n"
        if part.content_type:
            head += f"content-type: {part.content_type}\r\n"
        chunks.append(head.encode("utf-8") + b"\r\n" + part.data + b"\r\n")
    chunks.append(f"--{boundary}--\r\n".encode("utf-8"))
    return f"multipart/form-data; boundary={boundary}", b"".join(chunks)


def parse_multipart(content_type: str, body: bytes) -> list[Part]:
    boundary = _boundary_from(content_type)
    delimiter = b"--" + boundary.encode("utf-8")
    pieces = body.split(delimiter)
    # pieces[0] is a preamble, the last piece is the "--\r\n" epilogue
    parts = []
    for piece in pieces[1:-1]:
        piece = piece.removeprefix(b"\r\n")
        head, sep, data = piece.partition(b"\r\n\r\n")
        if not sep:
            raise BadRequest("malformed multipart section: missing blank line")
        data = data.removesuffix(b"\r\n")
        headers = _parse_part_headers(head)
        disposition = headers.get("content-disposition", "")
        parts.append(
            Part(
                name=_disposition_param(disposition, "name"),
                filename=_disposition_param(disposition, "filename") or None,
                content_type=headers.get("content-type"),
                data=data,
            )
        )
    if not parts:
        raise BadRequest("multipart body contains no parts")
    return parts


def _boundary_from(content_type: str) -> str:
    for token in content_type.split(";"):
        token = token.strip()
        if token.lower().startswith("boundary="):
            return token[len("boundary="):].strip('"')
    raise BadRequest("multipart content-type is missing its boundary")


def _parse_part_headers(head: bytes) -> dict[str, str]:
    headers = {}
    for line in head.decode("utf-8", "replace").split("\r\n"):
        name, sep, value = line.partition(":")
        if sep:
            headers[name.strip().lower()] = value.strip()
    return headers


def _disposition_param(disposition: str, name: str) -> str:
    for token in disposition.split(";"):
        token = token.strip()
        if token.startswith(f"{name}="):
            return token[len(name) + 1:].strip('"')
    return ""
