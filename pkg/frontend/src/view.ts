/**
 * DOM rendering for the annotation workbench. One task is shown at a time;
 * every widget attribute is derived from the TaskViewState so the form
 * invariants live in state.ts, not here.
 */

import type { AnnotateTask, ParaphraseTask, Task, WorkbenchClient } from "./api.js";
import { ServiceError } from "./api.js";
import { MAX_FEEDBACK_TOKENS } from "./tokenizer.js";
import {
  TaskViewState,
  initialState,
  setAllCorrect,
  setFeedback,
  feedbackDisabled,
  submitDisabled,
  tokenCount,
  toSubmission,
} from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderSchemaPreview(task: AnnotateTask): HTMLElement {
  const section = el("section", "schema-preview");
  section.appendChild(el("h2", undefined, `Database: ${task.schema_preview.db_id}`));
  for (const table of task.schema_preview.tables) {
    const wrap = el("div", "schema-table");
    wrap.appendChild(el("h3", undefined, table.name));
    const tableEl = el("table");
    const head = el("tr");
    for (const column of table.columns) {
      head.appendChild(el("th", undefined, `${column.name} (${column.type})`));
    }
    tableEl.appendChild(head);
    for (const row of table.sample_rows.slice(0, 2)) {
      const tr = el("tr");
      for (const value of row) tr.appendChild(el("td", undefined, String(value)));
      tableEl.appendChild(tr);
    }
    wrap.appendChild(tableEl);
    section.appendChild(wrap);
  }
  return section;
}

function renderSteps(task: AnnotateTask): HTMLElement {
  const list = el("ol", "steps");
  for (const step of task.steps) list.appendChild(el("li", undefined, step));
  return list;
}

export class Workbench {
  private state: TaskViewState | null = null;
  private task: Task | null = null;
  private sessionId: string | null = null;

  constructor(
    private readonly client: WorkbenchClient,
    private readonly root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    try {
      const session = await this.client.createSession();
      this.sessionId = session.session_id;
      await this.loadNext();
    } catch (error) {
      this.renderRetry(error, () => this.start());
    }
  }

  private async loadNext(): Promise<void> {
    try {
      const next = await this.client.nextTask(this.sessionId!);
      if (next.done) {
        this.renderDone();
        return;
      }
      this.task = next.task;
      this.state = initialState(next.task);
      this.renderTask();
    } catch (error) {
      this.renderRetry(error, () => this.loadNext());
    }
  }

  private update(next: TaskViewState): void {
    this.state = next;
    this.renderTask();
  }

  private renderTask(): void {
    const state = this.state!;
    const task = this.task!;
    this.root.textContent = "";

    const form = el("div", "task");
    form.appendChild(el("h1", undefined, "Question"));
    form.appendChild(el("p", "question", task.question));

    if (task.type === "annotate") {
      form.appendChild(renderSchemaPreview(task));
      form.appendChild(el("h2", undefined, "What the system did"));
      form.appendChild(renderSteps(task));
    } else {
      const para = task as ParaphraseTask;
      form.appendChild(el("h2", undefined, "Original feedback"));
      form.appendChild(el("p", "original-feedback", para.feedback));
      form.appendChild(el("p", undefined, "Rewrite this feedback in your own words."));
    }

    if (task.type === "annotate") {
      const label = el("label", "all-correct");
      const checkbox = el("input") as HTMLInputElement;
      checkbox.type = "checkbox";
      checkbox.id = "all-correct";
      checkbox.checked = state.allCorrect;
      checkbox.addEventListener("change", () =>
        this.update(setAllCorrect(this.state!, checkbox.checked)),
      );
      label.appendChild(checkbox);
      label.appendChild(document.createTextNode(" All steps are correct"));
      form.appendChild(label);
    }

    const textbox = el("textarea", "feedback") as HTMLTextAreaElement;
    textbox.id = "feedback";
    textbox.value = state.feedback;
    textbox.disabled = feedbackDisabled(state);
    textbox.placeholder =
      task.type === "paraphrase" ? "Your paraphrase" : "What went wrong?";
    textbox.addEventListener("input", () =>
      this.update(setFeedback(this.state!, textbox.value)),
    );
    form.appendChild(textbox);

    const count = tokenCount(state);
    const counter = el(
      "p",
      count > MAX_FEEDBACK_TOKENS ? "token-counter over" : "token-counter",
      `${count} / ${MAX_FEEDBACK_TOKENS} tokens`,
    );
    counter.id = "token-counter";
    form.appendChild(counter);

    const submit = el("button", "submit", "Submit") as HTMLButtonElement;
    submit.id = "submit";
    submit.disabled = submitDisabled(state);
    submit.addEventListener("click", () => this.submit());
    form.appendChild(submit);

    this.root.appendChild(form);
  }

  private async submit(): Promise<void> {
    if (submitDisabled(this.state!)) return;
    this.update({ ...this.state!, submitting: true });
    const submission = toSubmission({ ...this.state!, submitting: false });
    try {
      await this.client.submitAnnotation(this.sessionId!, submission);
      await this.loadNext();
    } catch (error) {
      this.update({ ...this.state!, submitting: false });
      this.renderBanner(error);
    }
  }

  private renderBanner(error: unknown): void {
    const banner = el("div", "error-banner", describe(error));
    banner.id = "error-banner";
    this.root.prepend(banner);
  }

  private renderRetry(error: unknown, retry: () => void): void {
    this.root.textContent = "";
    const banner = el("div", "error-banner", describe(error));
    banner.id = "error-banner";
    const button = el("button", "retry", "Retry");
    button.addEventListener("click", retry);
    this.root.appendChild(banner);
    this.root.appendChild(button);
  }

  private renderDone(): void {
    this.root.textContent = "";
    const done = el("div", "done");
    done.appendChild(el("h1", undefined, "All done"));
    done.appendChild(el("p", undefined, "Every task in this session has been submitted. Thank you."));
    this.root.appendChild(done);
  }
}

function describe(error: unknown): string {
  if (error instanceof ServiceError) {
    return `Request failed (${error.status}): ${error.body.message}`;
  }
  return "Could not reach the server. Check your connection and retry.";
}
