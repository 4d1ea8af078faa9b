/** Client-side validation of the trace form; no request leaves the page
 * until every field is usable. */

import type { TraceRequest } from "./api";

export interface FormValues {
  repo: string;
  commit: string;
  file: string;
  method: string;
  line: string;
}

export type ValidationResult =
  | { ok: true; request: TraceRequest }
  | { ok: false; errors: Partial<Record<keyof FormValues, string>> };

const COMMIT_PATTERN = /^[0-9a-fA-F]{4,40}$|^[\w./-]+$/;

export function validateForm(values: FormValues): ValidationResult {
  const errors: Partial<Record<keyof FormValues, string>> = {};
  if (!values.repo.trim()) {
    errors.repo = "repository path or URL is required";
  }
  const commit = values.commit.trim();
  if (!commit) {
    errors.commit = "start commit is required";
  } else if (!COMMIT_PATTERN.test(commit)) {
    errors.commit = "not a commit hash or ref";
  }
  if (!values.file.trim()) {
    errors.file = "file path is required";
  } else if (!values.file.trim().endsWith(".java")) {
    errors.file = "expected a .java file path";
  }
  if (!values.method.trim()) {
    errors.method = "method name is required";
  }
  const line = Number(values.line.trim());
  if (!values.line.trim() || !Number.isInteger(line) || line < 1) {
    errors.line = "line must be a positive integer";
  }
  if (Object.keys(errors).length > 0) {
    return { ok: false, errors };
  }
  return {
    ok: true,
    request: {
      repo: values.repo.trim(),
      commit,
      file: values.file.trim(),
      method: values.method.trim(),
      line,
    },
  };
}
