/**
 * Form-state logic for one task view. Pure functions so the rules can be
 * tested without a DOM; the view layer derives every widget attribute from
 * this state. It mirrors the server's validation (token cap, verdict vs.
 * feedback coupling) but the server remains authoritative.
 */

import { feedbackTokenCount, MAX_FEEDBACK_TOKENS } from "./tokenizer.js";
import type { AnnotationSubmission, Task } from "./api.js";

export type TaskMode = "annotate" | "paraphrase";

export interface TaskViewState {
  mode: TaskMode;
  taskId: string;
  /** "All steps are correct" — annotate mode only. */
  allCorrect: boolean;
  feedback: string;
  startedAt: number;
  submitting: boolean;
}

export function initialState(task: Task, now: number = Date.now()): TaskViewState {
  return {
    mode: task.type,
    taskId: task.task_id,
    allCorrect: false,
    feedback: "",
    startedAt: now,
    submitting: false,
  };
}

export function tokenCount(state: TaskViewState): number {
  return feedbackTokenCount(state.feedback);
}

export function overCap(state: TaskViewState): boolean {
  return tokenCount(state) > MAX_FEEDBACK_TOKENS;
}

/** Checking the box clears and disables the feedback textbox. */
export function setAllCorrect(state: TaskViewState, checked: boolean): TaskViewState {
  return {
    ...state,
    allCorrect: checked,
    feedback: checked ? "" : state.feedback,
  };
}

export function setFeedback(state: TaskViewState, text: string): TaskViewState {
  if (feedbackDisabled(state)) return state;
  return { ...state, feedback: text };
}

export function feedbackDisabled(state: TaskViewState): boolean {
  return state.mode === "annotate" && state.allCorrect;
}

export function submitDisabled(state: TaskViewState): boolean {
  if (state.submitting) return true;
  if (overCap(state)) return true;
  const hasFeedback = state.feedback.trim().length > 0;
  if (state.mode === "paraphrase") return !hasFeedback;
  return !state.allCorrect && !hasFeedback;
}

/** Must only be called when submitDisabled(state) is false. */
export function toSubmission(
  state: TaskViewState,
  now: number = Date.now(),
): AnnotationSubmission {
  if (submitDisabled(state)) {
    throw new Error("submission attempted while the form is invalid");
  }
  const correct = state.mode === "annotate" && state.allCorrect;
  return {
    task_id: state.taskId,
    verdict: correct ? "correct" : "incorrect",
    feedback: correct ? "" : state.feedback,
    elapsed_seconds: Math.max(0, (now - state.startedAt) / 1000),
  };
}
