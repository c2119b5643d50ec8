/** Typed client for the correction service's /v1 HTTP API. */

export interface SchemaPreviewColumn {
  name: string;
  type: string;
}

export interface SchemaPreviewTable {
  name: string;
  columns: SchemaPreviewColumn[];
  sample_rows: unknown[][];
}

export interface SchemaPreview {
  db_id: string;
  tables: SchemaPreviewTable[];
}

export interface AnnotateTask {
  task_id: string;
  type: "annotate";
  question: string;
  schema_preview: SchemaPreview;
  steps: string[];
}

export interface ParaphraseTask {
  task_id: string;
  type: "paraphrase";
  question: string;
  feedback: string;
}

export type Task = AnnotateTask | ParaphraseTask;

export type NextTaskResponse = { done: true } | { done: false; task: Task };

export interface AnnotationSubmission {
  task_id: string;
  verdict: "correct" | "incorrect";
  feedback: string;
  elapsed_seconds: number;
  annotator_id?: string;
}

export interface ApiError {
  code: string;
  message: string;
  count?: number;
  position?: number | null;
}

export class ServiceError extends Error {
  constructor(public readonly status: number, public readonly body: ApiError) {
    super(body.message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${base}${path}`, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(response.status, body as ApiError);
  }
  return body as T;
}

export class WorkbenchClient {
  constructor(private readonly base: string = "") {}

  createSession(): Promise<{ session_id: string; tasks: number }> {
    return request(this.base, "/v1/session", {
      method: "POST",
      body: JSON.stringify({}),
    });
  }

  nextTask(sessionId: string): Promise<NextTaskResponse> {
    return request(this.base, `/v1/session/${sessionId}/next`);
  }

  submitAnnotation(
    sessionId: string,
    submission: AnnotationSubmission,
  ): Promise<{ ok: boolean; task_id: string }> {
    return request(this.base, `/v1/session/${sessionId}/annotation`, {
      method: "POST",
      body: JSON.stringify(submission),
    });
  }
}
