import { describe, expect, it } from 'vitest';
import { layoutTree, renderTree, NODE_RADIUS } from '../src/tree.js';
import type { TreeNodeDoc } from '../src/types.js';

// The six-cell walkthrough shape: 1 -> 2 -> {3, 4}, 1 -> 5, 1 -> 6.
function sixNodes(): TreeNodeDoc[] {
  const node = (
    id: number,
    parentId: number | null,
    extra: Partial<TreeNodeDoc> = {},
  ): TreeNodeDoc => ({
    id,
    parentId,
    archived: false,
    kind: 'Visualization',
    summary: `cell ${id}`,
    chart: null,
    ...extra,
  });
  return [
    node(1, null),
    node(2, 1),
    node(3, 2),
    node(4, 2, { archived: true }),
    node(5, 1, { kind: 'ActionList' }),
    node(6, 1),
  ];
}

describe('layoutTree', () => {
  it('places children strictly below their parents', () => {
    const layout = layoutTree(sixNodes());
    const byId = new Map(layout.nodes.map((n) => [n.node.id, n]));
    for (const n of layout.nodes) {
      if (n.node.parentId === null) continue;
      const parent = byId.get(n.node.parentId);
      expect(parent).toBeDefined();
      if (!parent) continue;
      expect(n.y).toBeGreaterThan(parent.y);
      expect(n.depth).toBe(parent.depth + 1);
    }
  });

  it('centers each parent over its children', () => {
    const layout = layoutTree(sixNodes());
    const byId = new Map(layout.nodes.map((n) => [n.node.id, n]));
    const two = byId.get(2);
    const three = byId.get(3);
    const four = byId.get(4);
    expect(two && three && four).toBeTruthy();
    if (two && three && four) {
      expect(two.x).toBeCloseTo((three.x + four.x) / 2, 6);
    }
  });

  it('never overlaps nodes at the same depth', () => {
    const layout = layoutTree(sixNodes());
    const seen = new Map<number, number[]>();
    for (const n of layout.nodes) {
      const xs = seen.get(n.depth) ?? [];
      for (const x of xs) expect(Math.abs(n.x - x)).toBeGreaterThanOrEqual(NODE_RADIUS * 2);
      xs.push(n.x);
      seen.set(n.depth, xs);
    }
  });

  it('keeps every node inside the reported extent', () => {
    const layout = layoutTree(sixNodes());
    for (const n of layout.nodes) {
      expect(n.x).toBeGreaterThanOrEqual(NODE_RADIUS);
      expect(n.x).toBeLessThanOrEqual(layout.width - NODE_RADIUS);
      expect(n.y).toBeGreaterThanOrEqual(NODE_RADIUS);
      expect(n.y).toBeLessThanOrEqual(layout.height - NODE_RADIUS);
    }
  });

  it('returns nodes in id order regardless of input order', () => {
    const shuffled = sixNodes().reverse();
    const layout = layoutTree(shuffled);
    expect(layout.nodes.map((n) => n.node.id)).toEqual([1, 2, 3, 4, 5, 6]);
  });
});

describe('renderTree', () => {
  it('draws one edge per child and one group per node', () => {
    const svg = renderTree(layoutTree(sixNodes()));
    expect(svg.split('class="tree-edge"').length - 1).toBe(5);
    expect(svg.split('data-node-id=').length - 1).toBe(6);
  });

  it('labels every node with its id', () => {
    const svg = renderTree(layoutTree(sixNodes()));
    for (const id of [1, 2, 3, 4, 5, 6]) {
      expect(svg).toContain(`>${id}</text>`);
    }
  });

  it('grays out archived nodes', () => {
    const svg = renderTree(layoutTree(sixNodes()));
    expect(svg).toContain('tree-node archived');
    expect(svg).toContain('#cccccc');
  });

  it('marks the selected node', () => {
    const svg = renderTree(layoutTree(sixNodes()), { selectedId: 3 });
    expect(svg).toContain('tree-node selected');
    expect(svg).toContain('#111827');
  });

  it('escapes summaries in hover titles', () => {
    const nodes = sixNodes();
    const first = nodes[0];
    if (first) first.summary = 'cars < 1980 & "rare"';
    const svg = renderTree(layoutTree(nodes));
    expect(svg).toContain('cars &lt; 1980 &amp; &quot;rare&quot;');
  });
});
