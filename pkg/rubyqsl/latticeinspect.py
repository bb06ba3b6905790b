''' Draw lattices, strings and occupations as SVG '''

from __future__ import annotations
from typing import TYPE_CHECKING, Optional, Sequence
import xml.etree.ElementTree as ET

import numpy as np

from .reports import fmt

if TYPE_CHECKING:
    from .lattice import RubyLattice
    from .strings import StringSpec

STRING_COLORS = ('#d1211b', '#393ee3', '#2a9d3f', '#e38c1b', '#8e3bc4')


class LatticeDrawing:
    ''' Lattice svg with optional highlighted strings and excited sites

        Args:
            lat: The lattice
            strings: Strings to highlight. Z strings mark their sites,
                X strings mark the kagome link of each step.
            occupation: Basis state whose excited sites are filled
            pxwidth: Width of the drawing in pixels
            labels: Print site indices
    '''
    def __init__(self, lat: RubyLattice, strings: Sequence[StringSpec] = (),
                 occupation: Optional[int] = None, pxwidth: float = 400,
                 labels: bool = False):
        self.lat = lat
        self.strings = list(strings)
        self.occupation = occupation
        self.pxwidth = pxwidth
        self.labels = labels

    def _repr_svg_(self):
        ''' Jupyter representation '''
        return self.svg()

    def svg(self) -> str:
        ''' Lattice SVG string '''
        return ET.tostring(self.svgxml(), encoding='unicode')

    def _corners(self, t: int) -> np.ndarray:
        ''' Triangle corners as the nearest images of the triangle center '''
        tri = self.lat.triangles[t]
        center = np.asarray(tri.center)
        pos = np.array([self.lat.vertices[v].pos for v in tri.corners])
        return center + self.lat.minimage(pos - center)

    def svgxml(self) -> ET.Element:
        ''' Lattice svg as XML element tree '''
        lat = self.lat
        pts = np.vstack([lat.sites] + [self._corners(t) for t in range(len(lat.triangles))])
        margin = 1.0
        xmin, ymin = pts.min(axis=0) - margin
        xmax, ymax = pts.max(axis=0) + margin
        width, height = xmax - xmin, ymax - ymin

        def xy(p):
            # flip y so the lattice is drawn upright
            return fmt(p[0] - xmin), fmt(ymax - p[1])

        svg = ET.Element('svg')
        svg.set('xmlns', 'http://www.w3.org/2000/svg')
        svg.set('viewBox', f'0 0 {fmt(width)} {fmt(height)}')
        svg.set('width', fmt(self.pxwidth))
        svg.set('height', fmt(self.pxwidth * height / width))

        for t in range(len(lat.triangles)):
            poly = ET.SubElement(svg, 'polygon')
            poly.set('points', ' '.join(','.join(xy(c)) for c in self._corners(t)))
            poly.set('fill', 'none')
            poly.set('stroke', 'lightgray')
            poly.set('stroke-width', '1px')
            poly.set('vector-effect', 'non-scaling-stroke')

        if lat.hole_center is not None:
            x, y = xy(lat.hole_center)
            hole = ET.SubElement(svg, 'circle')
            hole.set('cx', x)
            hole.set('cy', y)
            hole.set('r', '0.4')
            hole.set('fill', 'none')
            hole.set('stroke', 'black')
            hole.set('stroke-dasharray', '2 2')
            hole.set('vector-effect', 'non-scaling-stroke')

        for k, s in enumerate(self.strings):
            color = STRING_COLORS[k % len(STRING_COLORS)]
            if s.kind == 'Z':
                for site in s.sites:
                    x, y = xy(lat.sites[site])
                    ring = ET.SubElement(svg, 'circle')
                    ring.set('cx', x)
                    ring.set('cy', y)
                    ring.set('r', '0.3')
                    ring.set('fill', 'none')
                    ring.set('stroke', color)
                    ring.set('stroke-width', '3px')
                    ring.set('vector-effect', 'non-scaling-stroke')
            else:
                for t, e in s.steps:
                    corners = self._corners(t)
                    a, b = (corners[j] for j in range(3) if j != (e + 2) % 3)
                    path = ET.SubElement(svg, 'path')
                    path.set('d', f'M {" ".join(xy(a))} L {" ".join(xy(b))}')
                    path.set('stroke', color)
                    path.set('stroke-width', '4px')
                    path.set('vector-effect', 'non-scaling-stroke')

        excited = set()
        if self.occupation is not None:
            excited = {s for s in range(lat.n_sites) if (int(self.occupation) >> s) & 1}
        for site, p in enumerate(lat.sites):
            x, y = xy(p)
            circ = ET.SubElement(svg, 'circle')
            circ.set('cx', x)
            circ.set('cy', y)
            circ.set('r', '0.15')
            circ.set('fill', 'black' if site in excited else 'white')
            circ.set('stroke', 'black')
            circ.set('stroke-width', '1px')
            circ.set('vector-effect', 'non-scaling-stroke')
            if self.labels:
                text = ET.SubElement(svg, 'text')
                text.set('x', x)
                text.set('y', y)
                text.set('font-size', '0.25')
                text.set('text-anchor', 'middle')
                text.text = str(site)
        return svg
