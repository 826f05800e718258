// Shared navigation: lists every known page. Pages register themselves by
// adding an entry here when they are generated.
const PAGES = [];

function renderNav() {
  const nav = document.getElementById("nav");
  if (!nav) return;
  nav.innerHTML = PAGES.map(
    (p) => `<a href="/pages/${p.slug}.html">${p.title}</a>`
  ).join(" | ");
}

document.addEventListener("DOMContentLoaded", renderNav);
