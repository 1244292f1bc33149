"""Minimal SVG writer: enough for binned heatmaps and line charts."""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr


class Svg:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.parts: list[str] = []
        self.comments: list[str] = []

    def comment(self, text):
        self.comments.append(text.replace("--", "- -"))

    def rect(self, x, y, w, h, fill, **attrs):
        self._add("rect", x=_n(x), y=_n(y), width=_n(w), height=_n(h), fill=fill, **attrs)

    def line(self, x1, y1, x2, y2, stroke="black", width=1, **attrs):
        self._add("line", x1=_n(x1), y1=_n(y1), x2=_n(x2), y2=_n(y2), stroke=stroke,
                  **{"stroke-width": _n(width)}, **attrs)

    def polyline(self, points, stroke="black", width=1.5):
        pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in points)
        self._add("polyline", points=pts, fill="none", stroke=stroke,
                  **{"stroke-width": _n(width)})

    def circle(self, x, y, r, fill="black"):
        self._add("circle", cx=_n(x), cy=_n(y), r=_n(r), fill=fill)

    def text(self, x, y, content, size=11, anchor="middle", **attrs):
        attr = _attrs(x=_n(x), y=_n(y), **{"font-size": size, "text-anchor": anchor,
                                            "font-family": "sans-serif"}, **attrs)
        self.parts.append(f"<text {attr}>{escape(str(content))}</text>")

    def _add(self, tag, **attrs):
        self.parts.append(f"<{tag} {_attrs(**attrs)}/>")

    def render(self):
        head = ['<?xml version="1.0" encoding="UTF-8"?>']
        head += [f"<!-- {c} -->" for c in self.comments]
        head.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                    f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        return "\n".join(head + self.parts + ["</svg>"]) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())


def _n(v):
    return f"{float(v):.2f}".rstrip("0").rstrip(".")


def _attrs(**attrs):
    return " ".join(f"{k.replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items())
