// Notebook view: renders the cell list and analysis tree from the server's
// session document and wires every interaction back to exactly one service
// call followed by a full refresh. No client-side analysis state beyond
// ViewState: re-fetching the document always reproduces the display.

import type { Api } from './api.js';
import { ApiError } from './api.js';
import type { CellDoc, QuestionDoc, SessionDoc, TreeNodeDoc } from './types.js';
import { renderChart } from './charts.js';
import { layoutTree, renderTree } from './tree.js';

export interface ViewState {
  sessionId: string | null;
  doc: SessionDoc | null;
  selectedCellId: number | null;
  pendingRequest: boolean;
}

export class NotebookView {
  readonly state: ViewState = {
    sessionId: null,
    doc: null,
    selectedCellId: null,
    pendingRequest: false,
  };

  private lastError: string | null = null;

  constructor(
    private readonly api: Api,
    private readonly root: HTMLElement,
  ) {}

  async open(sessionId: string): Promise<void> {
    this.state.sessionId = sessionId;
    this.state.selectedCellId = null;
    await this.loadDoc();
    this.render();
  }

  private async loadDoc(): Promise<void> {
    if (!this.state.sessionId) return;
    this.state.doc = await this.api.getSession(this.state.sessionId);
  }

  /**
   * Run one mutating call, then poll the full document. pendingRequest
   * blocks a second mutation while the first is in flight (double-clicks
   * must not produce two cells).
   */
  private async mutate(call: () => Promise<unknown>): Promise<void> {
    if (this.state.pendingRequest || !this.state.sessionId) return;
    this.state.pendingRequest = true;
    this.root.classList.add('pending');
    const prevMax = this.maxCellId();
    try {
      await call();
      await this.loadDoc();
      this.lastError = null;
    } catch (err) {
      this.lastError = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    } finally {
      this.state.pendingRequest = false;
      this.root.classList.remove('pending');
    }
    this.render();
    const created = this.maxCellId();
    if (created > prevMax) this.jumpToCell(created);
  }

  private maxCellId(): number {
    const doc = this.state.doc;
    return doc ? Math.max(0, ...doc.cells.map((c) => c.id)) : 0;
  }

  clickQuestion(cellId: number, questionId: string): Promise<void> {
    return this.mutate(() => this.api.selectQuestion(this.state.sessionId as string, cellId, questionId));
  }

  clickAction(cellId: number, actionIndex: number): Promise<void> {
    return this.mutate(() => this.api.selectAction(this.state.sessionId as string, cellId, actionIndex));
  }

  deleteCell(cellId: number): Promise<void> {
    return this.mutate(() => this.api.deleteCell(this.state.sessionId as string, cellId));
  }

  restoreCell(cellId: number): Promise<void> {
    return this.mutate(() => this.api.restoreCell(this.state.sessionId as string, cellId));
  }

  jumpToCell(cellId: number): void {
    this.state.selectedCellId = cellId;
    const el = this.root.querySelector(`[data-cell-id="${cellId}"]`);
    (el as HTMLElement | null)?.scrollIntoView?.({ behavior: 'smooth', block: 'start' });
    this.renderTreePane();
    this.root.querySelectorAll('.cell.selected').forEach((c) => c.classList.remove('selected'));
    el?.classList.add('selected');
  }

  // ── Rendering ──────────────────────────────────────────────────────────

  render(): void {
    this.root.textContent = '';
    const doc = this.state.doc;
    if (!doc) return;

    if (this.lastError) {
      const err = document.createElement('div');
      err.className = 'error-banner';
      err.textContent = this.lastError;
      this.root.appendChild(err);
    }

    const notebook = document.createElement('div');
    notebook.className = 'notebook';
    // notebook order mirrors the server's cell order exactly
    for (const cell of doc.cells) notebook.appendChild(this.renderCell(cell));
    this.root.appendChild(notebook);

    const sidebar = document.createElement('div');
    sidebar.className = 'sidebar';
    sidebar.appendChild(this.buildTreePane());
    this.root.appendChild(sidebar);
  }

  private renderCell(cell: CellDoc): HTMLElement {
    const section = document.createElement('section');
    section.className = `cell ${cell.kind === 'Visualization' ? 'cell-viz' : 'cell-actions'}`;
    if (cell.id === this.state.selectedCellId) section.classList.add('selected');
    section.dataset.cellId = String(cell.id);

    const header = document.createElement('header');
    header.className = 'cell-header';
    const tag = document.createElement('span');
    tag.className = 'cell-id';
    tag.textContent = `[${cell.id}]`;
    header.appendChild(tag);
    if (cell.parentId !== null) {
      const del = document.createElement('button');
      del.className = 'cell-delete';
      del.type = 'button';
      del.textContent = 'delete';
      del.addEventListener('click', () => void this.deleteCell(cell.id));
      header.appendChild(del);
    }
    section.appendChild(header);

    if (cell.kind === 'Visualization') {
      for (const entry of cell.content.insights ?? []) {
        const fig = document.createElement('figure');
        fig.className = 'insight';
        fig.innerHTML = renderChart(entry.chart, entry.data);
        const caption = document.createElement('figcaption');
        caption.textContent = entry.text;
        fig.appendChild(caption);
        section.appendChild(fig);
      }
      section.appendChild(this.renderPanel(cell));
    } else {
      const prompt = document.createElement('p');
      prompt.className = 'question-text';
      prompt.textContent = cell.content.questionText ?? '';
      section.appendChild(prompt);
      const list = document.createElement('div');
      list.className = 'actions';
      (cell.content.actions ?? []).forEach((action, i) => {
        const btn = document.createElement('button');
        btn.className = 'action';
        btn.type = 'button';
        btn.textContent = action.actionText;
        btn.addEventListener('click', () => void this.clickAction(cell.id, i));
        list.appendChild(btn);
      });
      section.appendChild(list);
    }
    return section;
  }

  private renderPanel(cell: CellDoc): HTMLElement {
    const panel = document.createElement('div');
    panel.className = 'panel';
    const questions: QuestionDoc[] = cell.panel ?? [];
    if (questions.length === 0) {
      const done = document.createElement('p');
      done.className = 'panel-empty';
      done.textContent = 'No further questions for this view.';
      panel.appendChild(done);
      return panel;
    }
    for (const q of questions) {
      const btn = document.createElement('button');
      btn.className = `question ${q.kind === 'LogicallyRelated' ? 'q-logical' : 'q-attribute'}`;
      btn.type = 'button';
      btn.dataset.questionId = q.id;
      btn.textContent = q.text;
      btn.title = q.kind;
      btn.addEventListener('click', () => void this.clickQuestion(cell.id, q.id));
      panel.appendChild(btn);
    }
    return panel;
  }

  // ── Tree pane ──────────────────────────────────────────────────────────

  private buildTreePane(): HTMLElement {
    const pane = document.createElement('div');
    pane.className = 'tree-pane';
    const heading = document.createElement('h2');
    heading.textContent = 'Analysis thread';
    pane.appendChild(heading);
    const wrap = document.createElement('div');
    wrap.className = 'tree-wrap';
    pane.appendChild(wrap);
    const tooltip = document.createElement('div');
    tooltip.className = 'tree-tooltip';
    tooltip.hidden = true;
    pane.appendChild(tooltip);
    const menu = document.createElement('div');
    menu.className = 'tree-menu';
    menu.hidden = true;
    pane.appendChild(menu);
    this.fillTreePane(pane);
    return pane;
  }

  private renderTreePane(): void {
    const pane = this.root.querySelector('.tree-pane');
    if (pane) this.fillTreePane(pane as HTMLElement);
  }

  private fillTreePane(pane: HTMLElement): void {
    const doc = this.state.doc;
    const wrap = pane.querySelector('.tree-wrap');
    if (!doc || !wrap) return;
    const layout = layoutTree(doc.tree.nodes);
    wrap.innerHTML = renderTree(layout, { selectedId: this.state.selectedCellId });

    const byId = new Map(doc.tree.nodes.map((n) => [n.id, n]));
    wrap.querySelectorAll('[data-node-id]').forEach((el) => {
      const node = byId.get(Number((el as HTMLElement).dataset.nodeId));
      if (!node) return;
      el.addEventListener('mouseenter', () => this.showTooltip(pane, el as HTMLElement, node));
      el.addEventListener('mouseleave', () => this.hideTooltip(pane));
      el.addEventListener('click', () => this.clickNode(pane, el as HTMLElement, node));
    });
  }

  private showTooltip(pane: HTMLElement, anchor: HTMLElement, node: TreeNodeDoc): void {
    const tooltip = pane.querySelector('.tree-tooltip') as HTMLElement | null;
    if (!tooltip) return;
    tooltip.innerHTML = node.chart
      ? renderChart(node.chart, node.data ?? [], { mini: true })
      : `<p class="tooltip-text"></p>`;
    if (!node.chart) {
      (tooltip.querySelector('.tooltip-text') as HTMLElement).textContent = node.summary;
    }
    tooltip.hidden = false;
  }

  private hideTooltip(pane: HTMLElement): void {
    const tooltip = pane.querySelector('.tree-tooltip') as HTMLElement | null;
    if (tooltip) tooltip.hidden = true;
  }

  /** Visible node: jump to its cell. Archived node: offer to restore it. */
  private clickNode(pane: HTMLElement, anchor: HTMLElement, node: TreeNodeDoc): void {
    const menu = pane.querySelector('.tree-menu') as HTMLElement | null;
    if (menu) {
      menu.hidden = true;
      menu.textContent = '';
    }
    if (!node.archived) {
      this.jumpToCell(node.id);
      return;
    }
    if (!menu) return;
    const btn = document.createElement('button');
    btn.className = 'restore';
    btn.type = 'button';
    btn.textContent = 'restore this cell';
    btn.addEventListener('click', () => {
      menu.hidden = true;
      void this.restoreCell(node.id);
    });
    menu.appendChild(btn);
    menu.hidden = false;
  }
}
