"""Minimal HTML element tree used by the converters and validators.

Strict tag-balance parsing with a fixed void-element list; real-web tag soup
is out of scope, so anything that does not nest cleanly is malformed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterator, Union

from .errors import MalformedHtmlError

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)


@dataclass
class Element:
    tag: str
    attrs: dict[str, str | None] = field(default_factory=dict)
    children: list[Union["Element", str]] = field(default_factory=list)

    def iter_elements(self) -> Iterator["Element"]:
        """Yield descendant elements in document order (self excluded)."""
        for child in self.children:
            if isinstance(child, Element):
                yield child
                yield from child.iter_elements()

    def find_all(self, *tags: str) -> list["Element"]:
        wanted = set(tags)
        return [el for el in self.iter_elements() if el.tag in wanted]

    def text(self) -> str:
        """Concatenated text content with all inner tags stripped."""
        parts: list[str] = []
        for child in self.children:
            parts.append(child.text() if isinstance(child, Element) else child)
        return "".join(parts)


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = Element("#document")
        self._stack: list[Element] = [self.root]

    def handle_starttag(self, tag, attrs):
        el = Element(tag, dict(attrs))
        self._stack[-1].children.append(el)
        if tag not in VOID_ELEMENTS:
            self._stack.append(el)

    def handle_startendtag(self, tag, attrs):
        self._stack[-1].children.append(Element(tag, dict(attrs)))

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            return
        top = self._stack[-1]
        if top is self.root:
            raise MalformedHtmlError(f"unexpected closing tag </{tag}>")
        if top.tag != tag:
            raise MalformedHtmlError(f"<{top.tag}> closed by </{tag}>")
        self._stack.pop()

    def handle_data(self, data):
        if data:
            self._stack[-1].children.append(data)

    def finish(self) -> Element:
        self.close()
        if len(self._stack) != 1:
            open_tags = ", ".join(el.tag for el in self._stack[1:])
            raise MalformedHtmlError(f"unclosed tags: {open_tags}")
        return self.root


def parse_html(html: str) -> Element:
    """Parse HTML into an element tree; raises MalformedHtmlError on tag soup."""
    builder = _TreeBuilder()
    try:
        builder.feed(html)
    except MalformedHtmlError:
        raise
    except Exception as exc:  # html.parser internals
        raise MalformedHtmlError(str(exc)) from exc
    return builder.finish()
