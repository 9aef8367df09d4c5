// Thin fetch wrapper over the analysis service. One method per endpoint;
// non-2xx responses raise ApiError carrying the server's error envelope.

import type {
  DatasetDoc,
  ErrorEnvelope,
  RecommendationsDoc,
  SelectResponse,
  SessionDoc,
  TreeResponse,
} from './types.js';

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly details?: Record<string, unknown>;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message || envelope.code);
    this.name = 'ApiError';
    this.code = envelope.code;
    this.status = status;
    this.details = envelope.details;
  }
}

async function toError(resp: Response): Promise<ApiError> {
  let envelope: ErrorEnvelope = { code: `HTTP${resp.status}`, message: resp.statusText };
  try {
    const body = (await resp.json()) as Partial<ErrorEnvelope>;
    if (body && typeof body.code === 'string') envelope = body as ErrorEnvelope;
  } catch {
    // non-JSON error body; keep the status-derived envelope
  }
  return new ApiError(resp.status, envelope);
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { 'content-type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) throw await toError(resp);
    return (await resp.json()) as T;
  }

  uploadDataset(name: string, csv: string): Promise<DatasetDoc> {
    return this.request('POST', '/datasets', { name, csv });
  }

  getDataset(datasetId: string): Promise<DatasetDoc> {
    return this.request('GET', `/datasets/${encodeURIComponent(datasetId)}`);
  }

  createSession(datasetId: string, rootSelector?: string): Promise<SessionDoc> {
    const body: Record<string, unknown> = { datasetId };
    if (rootSelector !== undefined) body.rootSelector = rootSelector;
    return this.request('POST', '/sessions', body);
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.request('GET', `/sessions/${encodeURIComponent(sessionId)}`);
  }

  recommendations(sessionId: string, cellId: number): Promise<RecommendationsDoc> {
    return this.request('GET', `/sessions/${encodeURIComponent(sessionId)}/cells/${cellId}/recommendations`);
  }

  selectQuestion(sessionId: string, cellId: number, questionId: string): Promise<SelectResponse> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/cells/${cellId}/select`, {
      questionId,
    });
  }

  selectAction(sessionId: string, cellId: number, actionIndex: number): Promise<SelectResponse> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/cells/${cellId}/select`, {
      actionIndex,
    });
  }

  deleteCell(sessionId: string, cellId: number): Promise<TreeResponse> {
    return this.request('DELETE', `/sessions/${encodeURIComponent(sessionId)}/cells/${cellId}`);
  }

  restoreCell(sessionId: string, cellId: number): Promise<TreeResponse> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/cells/${cellId}/restore`);
  }
}

// The surface view code depends on; tests substitute a canned implementation.
export type Api = Pick<
  ApiClient,
  | 'uploadDataset'
  | 'getDataset'
  | 'createSession'
  | 'getSession'
  | 'recommendations'
  | 'selectQuestion'
  | 'selectAction'
  | 'deleteCell'
  | 'restoreCell'
>;
