// Interactive runtime inlined into rendered vpr artifacts.
//
// Reads the serialized document from the `vpr-data` script block (and never
// writes to it), then wires up: overview scrollytelling, click/keyboard
// section navigation, a context show/hide toggle, screenshot zoom, and
// per-step check-off with per-section progress in the overview. Everything
// works offline; there is no network or storage access.

export interface ViewerState {
  currentSection: number;
  completedSteps: Set<number>;
  contextOn: boolean;
  zoomedAsset: string | null;
}

export interface ViewerApi {
  state: ViewerState;
  sectionCount: number;
  navigateTo(index: number): void;
  nextSection(): void;
  prevSection(): void;
  toggleContext(): void;
  checkOff(stepIndex: number): void;
  zoom(src: string): void;
  dismissZoom(): void;
  /** Scrollytelling hook: called by the intersection observer (threshold
   * 50%) and directly by tests that have no observer implementation. */
  onSectionVisibility(index: number, visible: boolean): void;
}

interface VprDocumentPayload {
  schema: string;
  version: number;
  title: string;
  steps: unknown[];
  sections: { index: number; step_indices: number[] }[];
}

function parsePayload(root: Document): VprDocumentPayload | null {
  const node = root.getElementById("vpr-data");
  if (!node || !node.textContent) return null;
  let payload: unknown;
  try {
    payload = JSON.parse(node.textContent);
  } catch {
    return null;
  }
  const doc = payload as VprDocumentPayload;
  if (!doc || doc.schema !== "vpr-document" || !Array.isArray(doc.steps)
      || !Array.isArray(doc.sections)) {
    return null;
  }
  return doc;
}

function showErrorBanner(root: Document): void {
  const banner = root.createElement("div");
  banner.className = "vpr-error-banner";
  banner.setAttribute("role", "alert");
  banner.textContent =
    "This document's embedded data could not be read; the static content "
    + "below is unaffected, but interactive features are off.";
  const host = root.querySelector(".wrap") || root.body;
  host.insertBefore(banner, host.firstChild);
}

export function initViewer(root: Document = document): ViewerApi | null {
  const payload = parsePayload(root);
  if (!payload) {
    showErrorBanner(root);
    return null;
  }

  const sections = Array.from(
    root.querySelectorAll<HTMLElement>("section.sec"));
  const entries = Array.from(
    root.querySelectorAll<HTMLElement>(".ov-entry"));
  const stepNodes = Array.from(
    root.querySelectorAll<HTMLElement>("[data-step]"));
  const contextNodes = Array.from(
    root.querySelectorAll<HTMLElement>(".context"));
  const hasContext = contextNodes.length > 0;

  const state: ViewerState = {
    currentSection: 0,
    completedSteps: new Set<number>(),
    contextOn: hasContext,
    zoomedAsset: null,
  };

  const stepsPerSection = new Map<number, number[]>();
  for (const section of payload.sections) {
    stepsPerSection.set(section.index, section.step_indices);
  }

  const visibleSections = new Set<number>();

  function setActive(index: number): void {
    if (index < 0 || index >= sections.length) return;
    state.currentSection = index;
    entries.forEach((entry, i) =>
      entry.classList.toggle("active", i === index));
  }

  function navigateTo(index: number): void {
    if (index < 0 || index >= sections.length) return;
    setActive(index);
    const target = sections[index];
    if (typeof target.scrollIntoView === "function") {
      target.scrollIntoView({ behavior: "smooth", block: "start" });
    }
  }

  function onSectionVisibility(index: number, visible: boolean): void {
    if (visible) visibleSections.add(index);
    else visibleSections.delete(index);
    if (visibleSections.size > 0) {
      setActive(Math.min(...visibleSections)); // topmost visible section
    }
  }

  function applyContextVisibility(): void {
    for (const node of contextNodes) {
      if (state.contextOn) node.removeAttribute("hidden");
      else node.setAttribute("hidden", "");
    }
  }

  function toggleContext(): void {
    if (!hasContext) return; // nothing to toggle in context-free formats
    state.contextOn = !state.contextOn;
    applyContextVisibility();
    if (toggleButton) {
      toggleButton.textContent = state.contextOn ? "Hide context" : "Show context";
      toggleButton.setAttribute("aria-pressed", String(state.contextOn));
    }
  }

  function updateProgress(): void {
    entries.forEach((entry, i) => {
      const steps = stepsPerSection.get(i) || [];
      const done = steps.filter((s) => state.completedSteps.has(s)).length;
      const progress = entry.querySelector<HTMLElement>(".ov-progress");
      if (progress) {
        progress.textContent = done > 0 ? `${done}/${steps.length}` : "";
      }
      entry.classList.toggle("done", steps.length > 0 && done === steps.length);
    });
  }

  function checkOff(stepIndex: number): void {
    if (state.completedSteps.has(stepIndex)) return; // idempotent
    const node = stepNodes.find(
      (el) => el.getAttribute("data-step") === String(stepIndex));
    if (!node) return;
    state.completedSteps.add(stepIndex);
    node.classList.add("completed");
    const button = node.querySelector<HTMLElement>("button.check");
    if (button) {
      button.setAttribute("aria-pressed", "true");
      button.textContent = "✓ done";
    }
    updateProgress();
  }

  function dismissZoom(): void {
    state.zoomedAsset = null;
    const overlay = root.querySelector(".vpr-zoom-overlay");
    if (overlay && overlay.parentNode) overlay.parentNode.removeChild(overlay);
  }

  function zoom(src: string): void {
    dismissZoom();
    state.zoomedAsset = src;
    const overlay = root.createElement("div");
    overlay.className = "vpr-zoom-overlay";
    const image = root.createElement("img");
    image.setAttribute("src", src);
    image.setAttribute("alt", "zoomed screenshot");
    overlay.appendChild(image);
    overlay.addEventListener("click", dismissZoom);
    root.body.appendChild(overlay);
  }

  // --- wiring ---------------------------------------------------------------

  entries.forEach((entry, i) => {
    entry.addEventListener("click", (event) => {
      event.preventDefault();
      navigateTo(i);
    });
  });

  for (const node of stepNodes) {
    const button = root.createElement("button");
    button.className = "check";
    button.type = "button";
    button.textContent = "mark done";
    button.setAttribute("aria-pressed", "false");
    const index = Number(node.getAttribute("data-step"));
    button.addEventListener("click", () => checkOff(index));
    const caption = node.querySelector("figcaption") || node;
    caption.appendChild(button);
  }

  let toggleButton: HTMLElement | null = null;
  if (hasContext) {
    const toolbar = root.getElementById("toolbar");
    if (toolbar) {
      const button = root.createElement("button");
      button.type = "button";
      button.id = "ctx-toggle";
      button.textContent = "Hide context";
      button.setAttribute("aria-pressed", "true");
      button.addEventListener("click", toggleContext);
      toolbar.appendChild(button);
      toggleButton = button;
    }
  }

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    if (target && target.matches && target.matches("img.shot")) {
      zoom(target.getAttribute("src") || "");
    }
  });

  root.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    if (key === "n" || key === "ArrowRight") api.nextSection();
    else if (key === "p" || key === "ArrowLeft") api.prevSection();
    else if (key === "Escape") dismissZoom();
  });

  if (typeof IntersectionObserver !== "undefined") {
    const observer = new IntersectionObserver((observed) => {
      for (const entry of observed) {
        const index = Number(
          (entry.target as HTMLElement).getAttribute("data-section"));
        onSectionVisibility(index, entry.isIntersecting);
      }
    }, { threshold: 0.5 });
    sections.forEach((section) => observer.observe(section));
  }

  const count = sections.length;
  const api: ViewerApi = {
    state,
    sectionCount: count,
    navigateTo,
    nextSection: () => navigateTo((state.currentSection + 1) % count),
    prevSection: () => navigateTo((state.currentSection - 1 + count) % count),
    toggleContext,
    checkOff,
    zoom,
    dismissZoom,
    onSectionVisibility,
  };

  setActive(0);
  applyContextVisibility();
  updateProgress();

  (root.defaultView as (Window & { __vprViewer?: ViewerApi }) | null
    || (globalThis as { __vprViewer?: ViewerApi })).__vprViewer = api;
  return api;
}

// Self-start when inlined into an artifact; imported as a module (tests)
// nothing runs until initViewer() is called explicitly.
if (typeof document !== "undefined" && document.getElementById("vpr-data")) {
  initViewer(document);
}
