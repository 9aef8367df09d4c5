// Analysis-thread tree: a tidy top-down layout plus an SVG renderer.
// Archived nodes are filled gray and restorable; the view layer wires hover
// tooltips and click-to-jump onto the emitted data-node-id attributes.

import type { TreeNodeDoc } from './types.js';
import { esc } from './charts.js';

export interface LaidOutNode {
  node: TreeNodeDoc;
  x: number;
  y: number;
  depth: number;
}

export interface TreeLayout {
  nodes: LaidOutNode[];
  width: number;
  height: number;
}

const H_GAP = 56;
const V_GAP = 64;
const MARGIN = 30;
export const NODE_RADIUS = 13;

/**
 * Position every node: depth sets y, leaves take consecutive x slots in id
 * order, and each parent centers over its children. Single pass, no
 * overlap within a depth because slots only ever grow rightward.
 */
export function layoutTree(nodes: TreeNodeDoc[]): TreeLayout {
  const byParent = new Map<number | null, TreeNodeDoc[]>();
  for (const n of [...nodes].sort((a, b) => a.id - b.id)) {
    const siblings = byParent.get(n.parentId) ?? [];
    siblings.push(n);
    byParent.set(n.parentId, siblings);
  }
  const roots = byParent.get(null) ?? [];
  const out: LaidOutNode[] = [];
  let nextSlot = 0;
  let maxDepth = 0;

  const place = (node: TreeNodeDoc, depth: number): number => {
    maxDepth = Math.max(maxDepth, depth);
    const children = byParent.get(node.id) ?? [];
    let x: number;
    if (children.length === 0) {
      x = nextSlot++;
    } else {
      const xs = children.map((c) => place(c, depth + 1));
      x = (Math.min(...xs) + Math.max(...xs)) / 2;
    }
    out.push({ node, x, y: depth, depth });
    return x;
  };
  for (const root of roots) place(root, 0);

  for (const n of out) {
    n.x = MARGIN + NODE_RADIUS + n.x * H_GAP;
    n.y = MARGIN + NODE_RADIUS + n.y * V_GAP;
  }
  out.sort((a, b) => a.node.id - b.node.id);
  return {
    nodes: out,
    width: MARGIN * 2 + NODE_RADIUS * 2 + Math.max(0, nextSlot - 1) * H_GAP,
    height: MARGIN * 2 + NODE_RADIUS * 2 + maxDepth * V_GAP,
  };
}

export interface TreeRenderOptions {
  selectedId?: number | null;
}

export function renderTree(layout: TreeLayout, opts: TreeRenderOptions = {}): string {
  const byId = new Map(layout.nodes.map((n) => [n.node.id, n]));
  const parts: string[] = [];

  for (const n of layout.nodes) {
    if (n.node.parentId === null) continue;
    const parent = byId.get(n.node.parentId);
    if (!parent) continue;
    parts.push(
      `<line class="tree-edge" x1="${parent.x}" y1="${parent.y + NODE_RADIUS}"` +
        ` x2="${n.x}" y2="${n.y - NODE_RADIUS}" stroke="#9aa5b1"/>`,
    );
  }
  for (const n of layout.nodes) {
    const { id, archived, kind } = n.node;
    const classes = ['tree-node'];
    if (archived) classes.push('archived');
    if (kind === 'ActionList') classes.push('action-list');
    if (opts.selectedId === id) classes.push('selected');
    const fill = archived ? '#cccccc' : kind === 'ActionList' ? '#f6c85f' : '#4e79a7';
    parts.push(
      `<g class="${classes.join(' ')}" data-node-id="${id}">` +
        `<circle cx="${n.x}" cy="${n.y}" r="${NODE_RADIUS}" fill="${fill}"` +
        ` stroke="${opts.selectedId === id ? '#111827' : '#ffffff'}" stroke-width="2"/>` +
        `<text x="${n.x}" y="${n.y + 4}" text-anchor="middle" class="tree-node-label">${id}</text>` +
        `<title>${esc(n.node.summary)}</title>` +
        `</g>`,
    );
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}"` +
    ` width="${layout.width}" height="${layout.height}" class="tree">` +
    parts.join('') +
    `</svg>`
  );
}
