/* vpr viewer runtime v1.0.0 */
(function () {
"use strict";
var exports = {};
"use strict";
// Interactive runtime inlined into rendered vpr artifacts.
//
// Reads the serialized document from the `vpr-data` script block (and never
// writes to it), then wires up: overview scrollytelling, click/keyboard
// section navigation, a context show/hide toggle, screenshot zoom, and
// per-step check-off with per-section progress in the overview. Everything
// works offline; there is no network or storage access.
Object.defineProperty(exports, "__esModule", { value: true });
exports.initViewer = initViewer;
function parsePayload(root) {
    const node = root.getElementById("vpr-data");
    if (!node || !node.textContent)
        return null;
    let payload;
    try {
        payload = JSON.parse(node.textContent);
    }
    catch (_a) {
        return null;
    }
    const doc = payload;
    if (!doc || doc.schema !== "vpr-document" || !Array.isArray(doc.steps)
        || !Array.isArray(doc.sections)) {
        return null;
    }
    return doc;
}
function showErrorBanner(root) {
    const banner = root.createElement("div");
    banner.className = "vpr-error-banner";
    banner.setAttribute("role", "alert");
    banner.textContent =
        "This document's embedded data could not be read; the static content "
            + "below is unaffected, but interactive features are off.";
    const host = root.querySelector(".wrap") || root.body;
    host.insertBefore(banner, host.firstChild);
}
function initViewer(root = document) {
    const payload = parsePayload(root);
    if (!payload) {
        showErrorBanner(root);
        return null;
    }
    const sections = Array.from(root.querySelectorAll("section.sec"));
    const entries = Array.from(root.querySelectorAll(".ov-entry"));
    const stepNodes = Array.from(root.querySelectorAll("[data-step]"));
    const contextNodes = Array.from(root.querySelectorAll(".context"));
    const hasContext = contextNodes.length > 0;
    const state = {
        currentSection: 0,
        completedSteps: new Set(),
        contextOn: hasContext,
        zoomedAsset: null,
    };
    const stepsPerSection = new Map();
    for (const section of payload.sections) {
        stepsPerSection.set(section.index, section.step_indices);
    }
    const visibleSections = new Set();
    function setActive(index) {
        if (index < 0 || index >= sections.length)
            return;
        state.currentSection = index;
        entries.forEach((entry, i) => entry.classList.toggle("active", i === index));
    }
    function navigateTo(index) {
        if (index < 0 || index >= sections.length)
            return;
        setActive(index);
        const target = sections[index];
        if (typeof target.scrollIntoView === "function") {
            target.scrollIntoView({ behavior: "smooth", block: "start" });
        }
    }
    function onSectionVisibility(index, visible) {
        if (visible)
            visibleSections.add(index);
        else
            visibleSections.delete(index);
        if (visibleSections.size > 0) {
            setActive(Math.min(...visibleSections)); // topmost visible section
        }
    }
    function applyContextVisibility() {
        for (const node of contextNodes) {
            if (state.contextOn)
                node.removeAttribute("hidden");
            else
                node.setAttribute("hidden", "");
        }
    }
    function toggleContext() {
        if (!hasContext)
            return; // nothing to toggle in context-free formats
        state.contextOn = !state.contextOn;
        applyContextVisibility();
        if (toggleButton) {
            toggleButton.textContent = state.contextOn ? "Hide context" : "Show context";
            toggleButton.setAttribute("aria-pressed", String(state.contextOn));
        }
    }
    function updateProgress() {
        entries.forEach((entry, i) => {
            const steps = stepsPerSection.get(i) || [];
            const done = steps.filter((s) => state.completedSteps.has(s)).length;
            const progress = entry.querySelector(".ov-progress");
            if (progress) {
                progress.textContent = done > 0 ? `${done}/${steps.length}` : "";
            }
            entry.classList.toggle("done", steps.length > 0 && done === steps.length);
        });
    }
    function checkOff(stepIndex) {
        if (state.completedSteps.has(stepIndex))
            return; // idempotent
        const node = stepNodes.find((el) => el.getAttribute("data-step") === String(stepIndex));
        if (!node)
            return;
        state.completedSteps.add(stepIndex);
        node.classList.add("completed");
        const button = node.querySelector("button.check");
        if (button) {
            button.setAttribute("aria-pressed", "true");
            button.textContent = "✓ done";
        }
        updateProgress();
    }
    function dismissZoom() {
        state.zoomedAsset = null;
        const overlay = root.querySelector(".vpr-zoom-overlay");
        if (overlay && overlay.parentNode)
            overlay.parentNode.removeChild(overlay);
    }
    function zoom(src) {
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
    let toggleButton = null;
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
        const target = event.target;
        if (target && target.matches && target.matches("img.shot")) {
            zoom(target.getAttribute("src") || "");
        }
    });
    root.addEventListener("keydown", (event) => {
        const key = event.key;
        if (key === "n" || key === "ArrowRight")
            api.nextSection();
        else if (key === "p" || key === "ArrowLeft")
            api.prevSection();
        else if (key === "Escape")
            dismissZoom();
    });
    if (typeof IntersectionObserver !== "undefined") {
        const observer = new IntersectionObserver((observed) => {
            for (const entry of observed) {
                const index = Number(entry.target.getAttribute("data-section"));
                onSectionVisibility(index, entry.isIntersecting);
            }
        }, { threshold: 0.5 });
        sections.forEach((section) => observer.observe(section));
    }
    const count = sections.length;
    const api = {
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
    (root.defaultView
        || globalThis).__vprViewer = api;
    return api;
}
// Self-start when inlined into an artifact; imported as a module (tests)
// nothing runs until initViewer() is called explicitly.
if (typeof document !== "undefined" && document.getElementById("vpr-data")) {
    initViewer(document);
}

})();
