/** Page wiring: trace form -> job poll -> timeline -> per-commit diff. */

import { ApiClient, ApiError, type HistoryDocument, type HistoryRecord } from "./api";
import { renderDiff } from "./diff";
import { pollJob } from "./poll";
import { renderTimeline } from "./timeline";
import { validateForm, type FormValues } from "./validate";

const client = new ApiClient("");
let activeJob: string | null = null;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

function readForm(): FormValues {
  return {
    repo: (el<HTMLInputElement>("field-repo")).value,
    commit: (el<HTMLInputElement>("field-commit")).value,
    file: (el<HTMLInputElement>("field-file")).value,
    method: (el<HTMLInputElement>("field-method")).value,
    line: (el<HTMLInputElement>("field-line")).value,
  };
}

function clearFieldErrors(): void {
  for (const node of Array.from(document.querySelectorAll(".field-error"))) {
    node.textContent = "";
  }
  el("banner").textContent = "";
  el("banner").className = "";
}

function showFieldErrors(errors: Record<string, string>): void {
  for (const [field, message] of Object.entries(errors)) {
    const slot = document.getElementById(`error-${field}`);
    if (slot) {
      slot.textContent = message;
    }
  }
}

function showBanner(kind: "error" | "info", text: string): void {
  const banner = el("banner");
  banner.textContent = text;
  banner.className = `banner banner-${kind}`;
}

function setStatus(text: string): void {
  el("job-status").textContent = text;
}

async function openDiff(documentResult: HistoryDocument, record: HistoryRecord): Promise<void> {
  const pane = el("diff-pane");
  const header = el("diff-header");
  const movement =
    record.file_before !== record.file_after
      ? `${record.file_before} → ${record.file_after}`
      : record.file_after;
  header.textContent = `${record.hash.slice(0, 12)}  ${movement}`;
  pane.textContent = "loading diff…";
  try {
    const text = await client.getDiff(
      documentResult.repository,
      record.hash,
      record.parents[0] ?? "",
      record.file_after,
    );
    renderDiff(pane, text, { highlightNewLine: record.start_line_after });
  } catch (error) {
    pane.textContent = "";
    showBanner("error", describeError(error));
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    const payload = error.payload as { error?: string; message?: string } | null;
    const code = payload?.error ?? `HTTP ${error.status}`;
    const message = payload?.message ?? "";
    return `${code}${message ? `: ${message}` : ""}`;
  }
  return error instanceof Error ? error.message : String(error);
}

async function submit(): Promise<void> {
  clearFieldErrors();
  const validation = validateForm(readForm());
  if (!validation.ok) {
    showFieldErrors(validation.errors as Record<string, string>);
    return;
  }
  const button = el<HTMLButtonElement>("submit");
  button.disabled = true;
  setStatus("submitting…");
  try {
    const jobId = await client.submitTrace(validation.request);
    activeJob = jobId;
    const status = await pollJob(client, jobId, {
      onUpdate: (update) => {
        if (activeJob === jobId) {
          setStatus(`${update.state.toLowerCase()}…`);
        }
      },
    });
    if (activeJob !== jobId) {
      return; // superseded by a newer submission
    }
    if (status.state === "Failed") {
      setStatus("failed");
      showBanner("error", describeError(new ApiError(0, { error: status.error?.code, message: status.error?.message })));
      return;
    }
    const result = await client.getResult(jobId);
    setStatus(result.complete ? "done" : "done (incomplete history)");
    renderTimeline(el("timeline-pane"), result, (record) => {
      void openDiff(result, record);
    });
  } catch (error) {
    if (error instanceof ApiError && error.status === 400) {
      const payload = error.payload as { fields?: Record<string, string> } | null;
      if (payload?.fields) {
        showFieldErrors(payload.fields);
      }
      setStatus("rejected");
      return;
    }
    if (error instanceof ApiError && error.status === 429) {
      showBanner("error", "the service queue is full; retry shortly");
      setStatus("rejected");
      return;
    }
    showBanner("error", describeError(error));
    setStatus("failed");
  } finally {
    button.disabled = false;
  }
}

export function wirePage(): void {
  el<HTMLFormElement>("trace-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void submit();
  });
}

if (typeof document !== "undefined" && document.getElementById("trace-form")) {
  wirePage();
}
