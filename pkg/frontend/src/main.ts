// Browser entry point: wires the page controls to a ReaderSession.

import { ApiClient } from "./api.js";
import { EventQueue } from "./events.js";
import { ReaderSession } from "./session.js";

const FLUSH_INTERVAL_MS = 5000;
const DWELL_SWEEP_MS = 500;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function start(): void {
  const serverInput = el<HTMLInputElement>("server");
  const learnerInput = el<HTMLInputElement>("learner");
  const densityInput = el<HTMLInputElement>("density");
  const densityLabel = el<HTMLElement>("density-value");
  const textInput = el<HTMLTextAreaElement>("text");
  const loadButton = el<HTMLButtonElement>("load");
  const reader = el<HTMLElement>("reader");

  let session: ReaderSession | null = null;
  let observer: IntersectionObserver | null = null;

  const buildSession = () => {
    const api = new ApiClient(serverInput.value || window.location.origin);
    const queue = new EventQueue(api, { storage: window.localStorage });
    return new ReaderSession({
      api,
      queue,
      learnerId: learnerInput.value || "local",
      root: reader,
      density: Number(densityInput.value),
    });
  };

  const observeSpans = () => {
    observer?.disconnect();
    if (!session) return;
    observer = new IntersectionObserver((entries) => {
      for (const entry of entries) {
        const spanId = (entry.target as HTMLElement).dataset.spanId;
        if (spanId) session?.setSpanVisible(spanId, entry.isIntersecting, performance.now());
      }
    });
    for (const spanEl of reader.querySelectorAll("[data-span-id]")) {
      observer.observe(spanEl);
    }
  };

  loadButton.addEventListener("click", () => {
    session = buildSession();
    void session.load(textInput.value).then(observeSpans);
  });

  densityInput.addEventListener("change", () => {
    densityLabel.textContent = densityInput.value;
    if (session) void session.setDensity(Number(densityInput.value)).then(observeSpans);
  });
  densityInput.addEventListener("input", () => {
    densityLabel.textContent = densityInput.value;
  });

  reader.addEventListener("click", (event) => session?.handleClick(event.target));

  window.setInterval(() => session?.dwellTick(performance.now()), DWELL_SWEEP_MS);
  window.setInterval(() => void session?.flushEvents(), FLUSH_INTERVAL_MS);
  window.addEventListener("beforeunload", () => void session?.flushEvents());
}

document.addEventListener("DOMContentLoaded", start);
