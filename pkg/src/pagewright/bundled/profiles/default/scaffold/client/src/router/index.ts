import { createRouter, createWebHistory, type RouteRecordRaw } from "vue-router";

// Every view in ../views is routable by its kebab-cased file name, so new
// pages become reachable the moment their file exists.
const modules = import.meta.glob("../views/*.vue");

function kebab(name: string): string {
  return name
    .replace(/View$/, "")
    .replace(/([a-z0-9])([A-Z])/g, "$1-$2")
    .toLowerCase();
}

export const routes: RouteRecordRaw[] = Object.entries(modules).map(
  ([file, loader]) => {
    const base = file.split("/").pop()!.replace(/\.vue$/, "");
    const slug = kebab(base);
    return {
      path: slug === "home" ? "/" : `/${slug}`,
      name: base.replace(/View$/, ""),
      component: loader
    };
  }
);

export const router = createRouter({
  history: createWebHistory(),
  routes
});
