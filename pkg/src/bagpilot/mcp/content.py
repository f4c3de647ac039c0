"""Tool result content blocks.

Every successful result is structured text with stable "key: value"
lines followed by a fenced JSON block of machine-readable values, so
both humans and models can parse it. Plots and images append an image
block after the text.
"""

import base64
import json
import re
from dataclasses import dataclass, field


@dataclass
class ToolResult:
    content: list[dict] = field(default_factory=list)
    is_error: bool = False

    def to_payload(self) -> dict:
        return {"content": self.content, "isError": self.is_error}

    def text(self) -> str:
        return "\n".join(
            block["text"] for block in self.content if block["type"] == "text"
        )


def render_text(title: str, lines: list[str], payload: dict | None) -> str:
    parts = [title]
    parts.extend(lines)
    if payload is not None:
        parts.append("")
        parts.append("```json")
        parts.append(json.dumps(payload, indent=2))
        parts.append("```")
    return "\n".join(parts)


def ok(title: str, lines: list[str] | None = None,
       payload: dict | None = None) -> ToolResult:
    return ToolResult([
        {"type": "text", "text": render_text(title, lines or [], payload)}
    ])


def ok_with_image(title: str, lines: list[str], payload: dict | None,
                  image_bytes: bytes, mime_type: str) -> ToolResult:
    return ToolResult([
        {"type": "text", "text": render_text(title, lines, payload)},
        {
            "type": "image",
            "data": base64.b64encode(image_bytes).decode("ascii"),
            "mimeType": mime_type,
        },
    ])


def fail(message: str) -> ToolResult:
    text = render_text(message, [], {"error": message})
    return ToolResult([{"type": "text", "text": text}], is_error=True)


_JSON_BLOCK_RE = re.compile(r"```json\s*\n(.*?)\n```", re.DOTALL)


def extract_json_block(text: str) -> dict | None:
    """Parse the last fenced JSON block out of a result text."""
    matches = _JSON_BLOCK_RE.findall(text)
    if not matches:
        return None
    try:
        return json.loads(matches[-1])
    except json.JSONDecodeError:
        return None
