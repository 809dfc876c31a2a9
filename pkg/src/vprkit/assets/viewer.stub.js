/* vpr viewer runtime stub v1 — placeholder inlined when the interactive
 * runtime bundle is not installed; the document stays a readable static page. */
(function () { "use strict"; })();
