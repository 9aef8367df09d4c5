// Entry point: dataset upload form plus session bootstrap. The page is
// served by the analysis service itself under /ui, so all API calls go to
// the same origin.

import { ApiClient, ApiError } from './api.js';
import { NotebookView } from './view.js';

const api = new ApiClient('');

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function showStatus(host: HTMLElement, message: string, isError = false): void {
  let status = host.querySelector('.status') as HTMLElement | null;
  if (!status) {
    status = el('div', 'status');
    host.appendChild(status);
  }
  status.classList.toggle('status-error', isError);
  status.textContent = message;
}

async function startSession(app: HTMLElement, datasetId: string): Promise<void> {
  const session = await api.createSession(datasetId);
  const url = new URL(location.href);
  url.searchParams.set('session', session.sessionId);
  history.replaceState(null, '', url.toString());
  app.textContent = '';
  const view = new NotebookView(api, app);
  await view.open(session.sessionId);
}

function renderUploadForm(app: HTMLElement): void {
  const form = el('form', 'upload-form');
  const title = el('h2', undefined, 'Start exploring a dataset');
  const nameInput = el('input') as HTMLInputElement;
  nameInput.type = 'text';
  nameInput.placeholder = 'dataset name';
  nameInput.required = true;
  const fileInput = el('input') as HTMLInputElement;
  fileInput.type = 'file';
  fileInput.accept = '.csv,text/csv';
  fileInput.required = true;
  const submit = el('button', 'primary', 'Upload and explore') as HTMLButtonElement;
  submit.type = 'submit';
  form.append(title, nameInput, fileInput, submit);
  app.appendChild(form);

  form.addEventListener('submit', (ev) => {
    ev.preventDefault();
    const file = fileInput.files?.[0];
    if (!file) return;
    submit.disabled = true;
    void (async () => {
      try {
        showStatus(form, 'Uploading and mining insights, this can take a moment...');
        const csv = await file.text();
        const dataset = await api.uploadDataset(nameInput.value || file.name, csv);
        await startSession(app, dataset.datasetId);
      } catch (err) {
        const msg = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
        showStatus(form, msg, true);
        submit.disabled = false;
      }
    })();
  });
}

async function boot(): Promise<void> {
  const app = document.getElementById('app');
  if (!app) return;
  const params = new URLSearchParams(location.search);
  const sessionId = params.get('session');
  const datasetId = params.get('dataset');
  try {
    if (sessionId) {
      const view = new NotebookView(api, app);
      await view.open(sessionId);
    } else if (datasetId) {
      await startSession(app, datasetId);
    } else {
      renderUploadForm(app);
    }
  } catch (err) {
    app.textContent = '';
    const msg = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    showStatus(app, msg, true);
    renderUploadForm(app);
  }
}

void boot();
